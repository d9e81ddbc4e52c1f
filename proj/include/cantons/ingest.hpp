#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cantons {

using VoteCount = std::int64_t;
using PartyVotes = std::map<std::string, VoteCount>;

enum class Bloc { Right = 0, Haredi, Center, Left, Arab, Other };

inline constexpr std::size_t kNumBlocs = 5;  // Other is never a feature
using BlocVector = std::array<double, kNumBlocs>;

std::string_view to_string(Bloc bloc);
Bloc bloc_from_string(std::string_view label);  // throws ParseError

struct ElectionRow {
    std::string raw_name;
    std::string normalized_name;
    VoteCount eligible_voters = 0;
    VoteCount total_votes = 0;
    PartyVotes party_votes;
};

struct ElectionDataset {
    int election_id = 0;
    int knesset_number = 0;
    std::string date;  // ISO yyyy-mm
    std::vector<std::string> parties;  // header order
    std::vector<ElectionRow> rows;

    VoteCount summed_eligible() const;
    VoteCount summed_total() const;
};

/// Knesset number and date of the five canonical elections, keyed 1..5.
struct ElectionInfo {
    int election_id;
    int knesset_number;
    const char* date;
};
const ElectionInfo& election_info(int election_id);

/// Municipality name canonicalizer with an editable alias table.
///
/// Normalization trims, lowercases ASCII, maps quote/apostrophe and dash
/// variants (including the Hebrew geresh, gershayim and maqaf) onto `'`, `"`
/// and `-`, collapses internal whitespace, and finally looks the result up
/// in the alias table. Alias keys and values are themselves normalized on
/// insertion and chains are resolved, so the function is idempotent.
class NameNormalizer {
public:
    NameNormalizer() = default;

    void add_alias(std::string_view variant, std::string_view canonical);
    /// Reads `variant,canonical` lines. A header line `variant,canonical` is skipped.
    static NameNormalizer from_alias_text(std::string_view text);

    std::string operator()(std::string_view raw) const;
    std::size_t alias_count() const { return aliases_.size(); }

private:
    std::map<std::string, std::string> aliases_;
};

/// Normalization without aliases.
std::string normalize_name(std::string_view raw);

/// Parses `name,eligible,total,<party>...` text. Throws ParseError with a
/// line number for malformed rows and ValidationError for invariant
/// violations (negative counts, party sum > total > eligible, duplicate names).
ElectionDataset parse_election_file(std::string_view text, int election_id,
                                    const NameNormalizer& normalizer = {});

class BlocMapping {
public:
    BlocMapping() = default;
    explicit BlocMapping(std::map<std::string, Bloc> entries) : entries_(std::move(entries)) {}

    /// Reads `party_symbol,bloc` lines; a `party_symbol,bloc` header is skipped.
    static BlocMapping from_text(std::string_view text);

    Bloc bloc_of(const std::string& party) const;
    const std::map<std::string, Bloc>& entries() const { return entries_; }

private:
    std::map<std::string, Bloc> entries_;
};

/// Municipalities present in every election, ordered by normalized name.
struct AlignedPanel {
    std::vector<std::string> municipality_ids;
    std::vector<std::string> names;          // display name, same order
    std::vector<double> voter_weight;        // mean eligible voters
    std::vector<int> election_ids;           // ascending
    std::vector<std::vector<std::string>> parties;  // per election, header order
    // Indexed [municipality][election position].
    std::vector<std::vector<PartyVotes>> votes;
    std::vector<std::vector<VoteCount>> eligible;
    std::vector<std::vector<VoteCount>> total;

    std::size_t size() const { return municipality_ids.size(); }
    std::size_t election_count() const { return election_ids.size(); }
    std::size_t election_position(int election_id) const;  // throws ValidationError

    /// Sum of party votes (the share denominator) for one municipality-election.
    VoteCount party_vote_total(std::size_t muni, std::size_t election_pos) const;

    /// Rebuilds the dataset for one election restricted to the panel.
    ElectionDataset project(int election_id) const;
    /// Single-election panel with the same municipality set.
    AlignedPanel single_election(int election_id) const;

    bool operator==(const AlignedPanel&) const = default;
};

/// Intersects normalized names across all datasets. Requires exactly five
/// nonempty datasets; throws AlignmentError with per-dataset counts when the
/// intersection is empty.
AlignedPanel align_panel(const std::vector<ElectionDataset>& datasets);

/// Same as align_panel without the five-election requirement.
AlignedPanel align_datasets(const std::vector<ElectionDataset>& datasets);

/// Bloc votes over total party votes, per municipality in panel order.
/// Throws ValidationError naming a municipality with zero party votes.
std::vector<BlocVector> bloc_vote_shares(const AlignedPanel& panel, const BlocMapping& mapping,
                                         int election_id);

/// Per-municipality mean of bloc_vote_shares over every election in the panel.
std::vector<BlocVector> mean_bloc_shares(const AlignedPanel& panel, const BlocMapping& mapping);

}  // namespace cantons
