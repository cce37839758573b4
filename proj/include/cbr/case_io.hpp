#pragma once

#include <filesystem>
#include <iosfwd>

#include "cbr/case_database.hpp"

namespace cbr {

// Line-delimited case-database format.
//
// Line 1 is a header object {"format":"cbr-casedb","version":1,"schema":...,
// "next_id":N}; each following line is one case. Field names inside the
// problem sections are the schema's attribute names. export(import(x)) == x
// byte for byte.
inline constexpr int kCaseDbFormatVersion = 1;

void export_database(const CaseDatabase& db, std::ostream& out);
CaseDatabase import_database(std::istream& in);

void save_database(const CaseDatabase& db, const std::filesystem::path& path);
CaseDatabase load_database(const std::filesystem::path& path);

}  // namespace cbr
