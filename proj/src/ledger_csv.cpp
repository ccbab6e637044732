#include "nsch/ledger_csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nsch::ledger_csv {

using diagnostics::LedgerRow;

namespace {

constexpr std::array<double LedgerRow::*, 15> kFields = {
    &LedgerRow::t,
    &LedgerRow::kinetic,
    &LedgerRow::free,
    &LedgerRow::interface,
    &LedgerRow::artificial,
    &LedgerRow::dissipation_viscous,
    &LedgerRow::dissipation_mu,
    &LedgerRow::dissipation_eps,
    &LedgerRow::dissipation_art,
    &LedgerRow::rhs_eps1,
    &LedgerRow::rhs_eps2,
    &LedgerRow::ito1,
    &LedgerRow::ito2,
    &LedgerRow::stochastic_increment,
    &LedgerRow::residual,
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& columns() {
  static const std::vector<std::string> cols = {
      "step",          "t",
      "kinetic",       "free",
      "interface",     "artificial",
      "dissipation_viscous", "dissipation_mu",
      "dissipation_eps",     "dissipation_art",
      "rhs_eps1",      "rhs_eps2",
      "ito1",          "ito2",
      "stochastic_increment", "residual",
  };
  return cols;
}

std::string header() {
  std::string h;
  for (const auto& c : columns()) h += (h.empty() ? "" : ",") + c;
  return h;
}

std::string format_row(const LedgerRow& row) {
  std::string s = std::to_string(row.step);
  for (auto f : kFields) s += "," + fmt(row.*f);
  return s;
}

void write(std::ostream& out, const std::vector<LedgerRow>& rows) {
  out << header() << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

std::vector<LedgerRow> read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != header()) throw std::runtime_error("ledger CSV: missing or unexpected header");
  std::vector<LedgerRow> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns().size())
      throw std::runtime_error("ledger CSV line " + std::to_string(lineno) + ": expected " +
                               std::to_string(columns().size()) + " fields");
    LedgerRow r;
    try {
      std::size_t used = 0;
      r.step = std::stol(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument(cells[0]);
      for (std::size_t i = 0; i < kFields.size(); ++i) {
        r.*kFields[i] = std::stod(cells[i + 1], &used);
        if (used != cells[i + 1].size()) throw std::invalid_argument(cells[i + 1]);
      }
    } catch (const std::logic_error&) {
      throw std::runtime_error("ledger CSV line " + std::to_string(lineno) + ": malformed number");
    }
    rows.push_back(r);
  }
  return rows;
}

bool same_row(const LedgerRow& a, const LedgerRow& b) { return format_row(a) == format_row(b); }

}  // namespace nsch::ledger_csv
