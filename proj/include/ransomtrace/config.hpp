#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ransomtrace {

struct ModeratorToken {
    std::string name;
    std::string token;
};

// JSON config file. Relative paths resolve against the config file's
// directory. Every field is optional.
//
// {"node_url": "...", "fixture": "chain.json", "rates": "rates.csv",
//  "labels": "labels.json", "exclusions": "exclusions.json",
//  "registry": "raas_families.txt", "db": "ransomtrace.db",
//  "moderator_tokens": ["secret", {"name": "alice", "token": "..."}],
//  "submissions_per_minute": 30}
struct Config {
    std::string node_url;
    std::string fixture;
    std::string rates;
    std::string labels;
    std::string exclusions;
    std::string registry;
    std::string db = "ransomtrace.db";
    std::vector<ModeratorToken> moderator_tokens;
    std::size_t submissions_per_minute = 30;
};

Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text, const std::filesystem::path& base_dir);

// Name of the moderator owning `token`, if any.
std::optional<std::string> moderator_for(const Config& config, const std::string& token);

inline constexpr const char* kNodeUrlEnv = "RANSOMTRACE_NODE_URL";

} // namespace ransomtrace
