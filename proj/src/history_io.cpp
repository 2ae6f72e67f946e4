#include "filexpert/history_io.hpp"

#include <string>

#include <json.hpp>

#include "filexpert/error.hpp"

namespace filexpert::history {

using nlohmann::json;

namespace {

constexpr int schema_version = 1;

std::string dump(const json& j) {
    // File contents are not guaranteed to be UTF-8.
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

json to_json(const FileChangeEvent& ev) {
    json j{{"path", ev.path}, {"change_kind", to_string(ev.kind)}};
    if (ev.old_path)
        j["old_path"] = *ev.old_path;
    if (ev.before_content)
        j["before"] = *ev.before_content;
    if (ev.after_content)
        j["after"] = *ev.after_content;
    return j;
}

FileChangeEvent event_from_json(const json& j) {
    FileChangeEvent ev;
    ev.path = j.at("path").get<std::string>();
    ev.kind = change_kind_from_string(j.at("change_kind").get<std::string>());
    if (j.contains("old_path"))
        ev.old_path = j["old_path"].get<std::string>();
    if (j.contains("before"))
        ev.before_content = j["before"].get<std::string>();
    if (j.contains("after"))
        ev.after_content = j["after"].get<std::string>();
    return ev;
}

} // namespace

void write_ndjson(std::ostream& out, const CommitHistory& history) {
    json meta{{"v", schema_version},
              {"kind", "meta"},
              {"branch", history.branch},
              {"tip", history.tip},
              {"reference_time", history.reference_time},
              {"rename_similarity", history.rename_similarity}};
    out << dump(meta) << '\n';
    for (const auto& c : history.commits) {
        json changes = json::array();
        for (const auto& ev : c.changes)
            changes.push_back(to_json(ev));
        json line{{"v", schema_version},
                  {"kind", "commit"},
                  {"id", c.id},
                  {"author", {{"name", c.author.name}, {"email", c.author.email}}},
                  {"timestamp", c.timestamp},
                  {"changes", std::move(changes)}};
        out << dump(line) << '\n';
    }
}

CommitHistory read_ndjson(std::istream& in) {
    CommitHistory history;
    std::string line;
    std::size_t line_no = 0;
    bool saw_meta = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error("history", "CorruptHistory",
                        "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (j.value("v", 0) != schema_version)
            throw Error("history", "CorruptHistory",
                        "line " + std::to_string(line_no) + ": unsupported schema version");
        try {
            auto kind = j.at("kind").get<std::string>();
            if (kind == "meta") {
                history.branch = j.value("branch", "");
                history.tip = j.value("tip", "");
                history.reference_time = j.at("reference_time").get<Timestamp>();
                history.rename_similarity = j.value("rename_similarity", 50);
                saw_meta = true;
            } else if (kind == "commit") {
                CommitRecord c;
                c.id = j.at("id").get<std::string>();
                c.author.name = j.at("author").at("name").get<std::string>();
                c.author.email = j.at("author").at("email").get<std::string>();
                c.timestamp = j.at("timestamp").get<Timestamp>();
                for (const auto& ev : j.at("changes"))
                    c.changes.push_back(event_from_json(ev));
                history.commits.push_back(std::move(c));
            }
        } catch (const json::exception& e) {
            throw Error("history", "CorruptHistory",
                        "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!saw_meta)
        throw Error("history", "CorruptHistory", "missing metadata record");
    return history;
}

} // namespace filexpert::history
