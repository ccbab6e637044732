// Ledger rows as CSV, 17 significant digits.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nsch/diagnostics.hpp"

namespace nsch::ledger_csv {

const std::vector<std::string>& columns();
std::string header();
std::string format_row(const diagnostics::LedgerRow& row);

void write(std::ostream& out, const std::vector<diagnostics::LedgerRow>& rows);
/// Throws std::runtime_error naming the line on malformed input.
std::vector<diagnostics::LedgerRow> read(std::istream& in);

/// Equality at the printed precision.
bool same_row(const diagnostics::LedgerRow& a, const diagnostics::LedgerRow& b);

}  // namespace nsch::ledger_csv
