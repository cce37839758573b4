#include "cbr/case_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cbr/json_codec.hpp"

namespace cbr {

void export_database(const CaseDatabase& db, std::ostream& out)
{
    const json header = {
        {"format", "cbr-casedb"},
        {"version", kCaseDbFormatVersion},
        {"schema", to_json(db.schema())},
        {"next_id", db.next_id()},
    };
    out << header.dump() << '\n';
    for (const auto* c : db.cases()) out << to_json(*c).dump() << '\n';
}

CaseDatabase import_database(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw ConfigurationError("case database: missing header line");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(std::string("case database header: ") + e.what());
    }
    if (header.value("format", std::string{}) != "cbr-casedb") {
        throw ConfigurationError("case database: not a cbr-casedb file");
    }
    if (header.value("version", 0) != kCaseDbFormatVersion) {
        throw ConfigurationError("case database: unsupported version " + header.value("version", json{}).dump());
    }

    CaseDatabase db(schema_from_json(header.at("schema")));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            db.insert_verbatim(case_from_json(json::parse(line), db.schema()));
        } catch (const json::parse_error& e) {
            throw ConfigurationError("case database line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ConfigurationError& e) {
            throw ConfigurationError("case database line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    // The header may record a higher id than any surviving case.
    db.advance_next_id(header.value("next_id", CaseId{1}));
    return db;
}

void save_database(const CaseDatabase& db, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigurationError("cannot write " + path.string());
    export_database(db, out);
}

CaseDatabase load_database(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError("cannot read " + path.string());
    return import_database(in);
}

}  // namespace cbr
