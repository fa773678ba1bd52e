#include <ransomtrace/config.hpp>
#include <ransomtrace/dataset.hpp>
#include <ransomtrace/error.hpp>

#include <json.hpp>

namespace ransomtrace {

Config parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ConfigError", std::string("invalid config JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error("ConfigError", "config must be a JSON object");

    auto path_field = [&](const char* key, std::string& out) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) throw Error("ConfigError", std::string(key) + " must be a string");
        const std::filesystem::path p = j[key].get<std::string>();
        out = (p.is_relative() && !p.empty() ? base_dir / p : p).string();
    };

    Config c;
    if (j.contains("node_url")) c.node_url = j["node_url"].get<std::string>();
    path_field("fixture", c.fixture);
    path_field("rates", c.rates);
    path_field("labels", c.labels);
    path_field("exclusions", c.exclusions);
    path_field("registry", c.registry);
    path_field("db", c.db);
    if (j.contains("submissions_per_minute")) c.submissions_per_minute = j["submissions_per_minute"].get<std::size_t>();
    if (j.contains("moderator_tokens")) {
        std::size_t n = 0;
        for (const auto& t : j["moderator_tokens"]) {
            ++n;
            if (t.is_string())
                c.moderator_tokens.push_back({"moderator-" + std::to_string(n), t.get<std::string>()});
            else if (t.is_object())
                c.moderator_tokens.push_back({t.value("name", "moderator-" + std::to_string(n)),
                                              t.at("token").get<std::string>()});
            else
                throw Error("ConfigError", "moderator_tokens entries must be strings or objects");
        }
    }
    return c;
}

Config load_config(const std::filesystem::path& path)
{
    return parse_config(read_file(path), path.parent_path());
}

std::optional<std::string> moderator_for(const Config& config, const std::string& token)
{
    if (token.empty()) return std::nullopt;
    for (const auto& t : config.moderator_tokens)
        if (t.token == token) return t.name;
    return std::nullopt;
}

} // namespace ransomtrace
