#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "filexpert/history.hpp"

namespace filexpert::identity {

struct DeveloperId {
    // Lowest lowercased email of the group; stable across input orderings.
    std::string canonical_key;
    // Longest name in the group.
    std::string display_name;
    std::set<std::string> emails; // lowercased
    std::set<std::string> names;

    bool operator==(const DeveloperId&) const = default;
};

using AliasPairs = std::vector<std::pair<std::string, std::string>>;

struct ResolveOptions {
    // Names merge when levenshtein <= alias_threshold * length of the longer
    // normalized name.
    double alias_threshold = 0.30;
    // Email pairs known to belong to one person; merged before the automatic rules.
    AliasPairs manual_aliases;
};

using IdentityMap = std::map<history::RawIdentity, DeveloperId>;

// Partitions identities into developers: equal emails merge, then groups
// with similar normalized names merge, transitively.
IdentityMap resolve_identities(const std::vector<history::RawIdentity>& identities,
                               const ResolveOptions& options = {});

bool similar_names(std::string_view a, std::string_view b, double threshold);

// Replaces every author with {display_name, canonical_key}.
history::CommitHistory canonicalize_history(const history::CommitHistory& history,
                                            const ResolveOptions& options = {});

// Reads "email_a,email_b" rows; a header row starting with "email" is skipped.
AliasPairs read_alias_csv(const std::filesystem::path& path);

} // namespace filexpert::identity
