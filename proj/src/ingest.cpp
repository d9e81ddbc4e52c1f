#include "cantons/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "cantons/error.hpp"
#include "csv.hpp"

namespace cantons {

namespace {

constexpr std::array<ElectionInfo, 5> kElections{{
    {1, 21, "2019-04"},
    {2, 22, "2019-09"},
    {3, 23, "2020-03"},
    {4, 24, "2021-03"},
    {5, 25, "2022-11"},
}};

struct Replacement {
    std::string_view from;
    char to;
};

// UTF-8 punctuation variants seen in transliterated municipality names.
constexpr std::array<Replacement, 17> kReplacements{{
    {"\xE2\x80\x98", '\''},  // left single quote
    {"\xE2\x80\x99", '\''},  // right single quote
    {"\xE2\x80\xB2", '\''},  // prime
    {"\xC2\xB4", '\''},      // acute accent
    {"\xD7\xB3", '\''},      // geresh
    {"`", '\''},
    {"\xE2\x80\x9C", '"'},  // left double quote
    {"\xE2\x80\x9D", '"'},  // right double quote
    {"\xD7\xB4", '"'},      // gershayim
    {"\xE2\x80\x90", '-'},  // hyphen
    {"\xE2\x80\x91", '-'},  // non-breaking hyphen
    {"\xE2\x80\x92", '-'},  // figure dash
    {"\xE2\x80\x93", '-'},  // en dash
    {"\xE2\x80\x94", '-'},  // em dash
    {"\xE2\x88\x92", '-'},  // minus sign
    {"\xD6\xBE", '-'},      // maqaf
    {"\xC2\xA0", ' '},      // no-break space
}};

VoteCount parse_count(const std::string& field, std::size_t line, std::string_view column) {
    if (field.empty()) throw ParseError("empty count in column '" + std::string(column) + "'", line);
    VoteCount value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError("non-integer count '" + field + "' in column '" + std::string(column) + "'", line);
    if (value < 0)
        throw ValidationError("line " + std::to_string(line) + ": negative count in column '" +
                              std::string(column) + "'");
    return value;
}

std::string lower_ascii(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

}  // namespace

std::string_view to_string(Bloc bloc) {
    switch (bloc) {
        case Bloc::Right: return "Right";
        case Bloc::Haredi: return "Haredi";
        case Bloc::Center: return "Center";
        case Bloc::Left: return "Left";
        case Bloc::Arab: return "Arab";
        case Bloc::Other: return "Other";
    }
    return "Other";
}

Bloc bloc_from_string(std::string_view label) {
    const std::string key = lower_ascii(detail::trim(label));
    for (int b = 0; b <= static_cast<int>(Bloc::Other); ++b) {
        const auto bloc = static_cast<Bloc>(b);
        if (lower_ascii(std::string(to_string(bloc))) == key) return bloc;
    }
    throw ParseError("unknown bloc label '" + std::string(label) + "'", 0);
}

VoteCount ElectionDataset::summed_eligible() const {
    VoteCount sum = 0;
    for (const auto& r : rows) sum += r.eligible_voters;
    return sum;
}

VoteCount ElectionDataset::summed_total() const {
    VoteCount sum = 0;
    for (const auto& r : rows) sum += r.total_votes;
    return sum;
}

const ElectionInfo& election_info(int election_id) {
    if (election_id < 1 || election_id > static_cast<int>(kElections.size()))
        throw ValidationError("election id must be in 1..5, got " + std::to_string(election_id));
    return kElections[static_cast<std::size_t>(election_id - 1)];
}

// ---------------------------------------------------------------------------
// Names

std::string normalize_name(std::string_view raw) {
    std::string s(raw);
    for (const auto& r : kReplacements) {
        std::size_t pos = 0;
        while ((pos = s.find(r.from, pos)) != std::string::npos) {
            s.replace(pos, r.from.size(), 1, r.to);
            ++pos;
        }
    }
    s = lower_ascii(std::move(s));

    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

void NameNormalizer::add_alias(std::string_view variant, std::string_view canonical) {
    const std::string key = normalize_name(variant);
    std::string value = normalize_name(canonical);
    if (const auto it = aliases_.find(value); it != aliases_.end()) value = it->second;
    if (key.empty() || key == value) return;
    aliases_[key] = value;
    for (auto& [k, v] : aliases_)
        if (v == key) v = value;
}

NameNormalizer NameNormalizer::from_alias_text(std::string_view text) {
    NameNormalizer normalizer;
    const auto records = detail::read_csv(text);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.fields.size() != 2)
            throw ParseError("alias row needs exactly 2 fields, got " + std::to_string(rec.fields.size()),
                             rec.line);
        if (i == 0 && lower_ascii(rec.fields[0]) == "variant" && lower_ascii(rec.fields[1]) == "canonical")
            continue;
        normalizer.add_alias(rec.fields[0], rec.fields[1]);
    }
    return normalizer;
}

std::string NameNormalizer::operator()(std::string_view raw) const {
    std::string name = normalize_name(raw);
    if (const auto it = aliases_.find(name); it != aliases_.end()) return it->second;
    return name;
}

// ---------------------------------------------------------------------------
// Election files

ElectionDataset parse_election_file(std::string_view text, int election_id,
                                    const NameNormalizer& normalizer) {
    const ElectionInfo& info = election_info(election_id);
    ElectionDataset ds;
    ds.election_id = election_id;
    ds.knesset_number = info.knesset_number;
    ds.date = info.date;

    const auto records = detail::read_csv(text);
    if (records.empty()) throw ParseError("missing header row", 1);

    const auto& header = records.front().fields;
    if (header.size() < 3 || lower_ascii(header[0]) != "name" || lower_ascii(header[1]) != "eligible" ||
        lower_ascii(header[2]) != "total")
        throw ParseError("header must start with name,eligible,total", records.front().line);
    std::set<std::string> seen_parties;
    for (std::size_t c = 3; c < header.size(); ++c) {
        if (header[c].empty()) throw ParseError("empty party symbol in header", records.front().line);
        if (!seen_parties.insert(header[c]).second)
            throw ParseError("duplicate party symbol '" + header[c] + "'", records.front().line);
        ds.parties.push_back(header[c]);
    }

    std::set<std::string> seen_names;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(rec.fields.size()),
                             rec.line);
        ElectionRow row;
        row.raw_name = rec.fields[0];
        row.normalized_name = normalizer(row.raw_name);
        if (row.normalized_name.empty()) throw ParseError("empty municipality name", rec.line);
        row.eligible_voters = parse_count(rec.fields[1], rec.line, "eligible");
        row.total_votes = parse_count(rec.fields[2], rec.line, "total");
        VoteCount party_sum = 0;
        for (std::size_t c = 3; c < header.size(); ++c) {
            const VoteCount v = parse_count(rec.fields[c], rec.line, header[c]);
            row.party_votes[header[c]] = v;
            party_sum += v;
        }
        if (row.total_votes > row.eligible_voters)
            throw ValidationError("line " + std::to_string(rec.line) + ": total votes " +
                                  std::to_string(row.total_votes) + " exceed eligible voters " +
                                  std::to_string(row.eligible_voters));
        if (party_sum > row.total_votes)
            throw ValidationError("line " + std::to_string(rec.line) + ": party votes " +
                                  std::to_string(party_sum) + " exceed total votes " +
                                  std::to_string(row.total_votes));
        if (!seen_names.insert(row.normalized_name).second)
            throw ValidationError("line " + std::to_string(rec.line) + ": duplicate municipality '" +
                                  row.normalized_name + "'");
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Bloc mapping

BlocMapping BlocMapping::from_text(std::string_view text) {
    std::map<std::string, Bloc> entries;
    const auto records = detail::read_csv(text);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.fields.size() != 2)
            throw ParseError("bloc mapping row needs exactly 2 fields", rec.line);
        if (i == 0 && lower_ascii(rec.fields[0]) == "party_symbol") continue;
        try {
            entries[rec.fields[0]] = bloc_from_string(rec.fields[1]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), rec.line);
        }
    }
    return BlocMapping(std::move(entries));
}

Bloc BlocMapping::bloc_of(const std::string& party) const {
    const auto it = entries_.find(party);
    return it == entries_.end() ? Bloc::Other : it->second;
}

// ---------------------------------------------------------------------------
// Panel

std::size_t AlignedPanel::election_position(int election_id) const {
    const auto it = std::find(election_ids.begin(), election_ids.end(), election_id);
    if (it == election_ids.end())
        throw ValidationError("election " + std::to_string(election_id) + " is not in the panel");
    return static_cast<std::size_t>(it - election_ids.begin());
}

VoteCount AlignedPanel::party_vote_total(std::size_t muni, std::size_t election_pos) const {
    VoteCount sum = 0;
    for (const auto& [party, v] : votes[muni][election_pos]) sum += v;
    return sum;
}

ElectionDataset AlignedPanel::project(int election_id) const {
    const std::size_t e = election_position(election_id);
    const ElectionInfo& info = election_info(election_id);
    ElectionDataset ds;
    ds.election_id = election_id;
    ds.knesset_number = info.knesset_number;
    ds.date = info.date;
    ds.parties = parties[e];
    for (std::size_t i = 0; i < size(); ++i) {
        ElectionRow row;
        row.raw_name = names[i];
        row.normalized_name = municipality_ids[i];
        row.eligible_voters = eligible[i][e];
        row.total_votes = total[i][e];
        row.party_votes = votes[i][e];
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

AlignedPanel AlignedPanel::single_election(int election_id) const {
    return align_datasets({project(election_id)});
}

AlignedPanel align_datasets(const std::vector<ElectionDataset>& input) {
    if (input.empty()) throw AlignmentError("no datasets to align");
    std::vector<const ElectionDataset*> datasets;
    for (const auto& ds : input) datasets.push_back(&ds);
    std::sort(datasets.begin(), datasets.end(),
              [](const auto* a, const auto* b) { return a->election_id < b->election_id; });
    for (std::size_t i = 1; i < datasets.size(); ++i)
        if (datasets[i]->election_id == datasets[i - 1]->election_id)
            throw AlignmentError("election " + std::to_string(datasets[i]->election_id) + " given twice");

    std::vector<std::map<std::string, const ElectionRow*>> index(datasets.size());
    for (std::size_t e = 0; e < datasets.size(); ++e)
        for (const auto& row : datasets[e]->rows) index[e][row.normalized_name] = &row;

    std::vector<std::string> common;
    for (const auto& [name, row] : index.front()) {
        bool everywhere = true;
        for (std::size_t e = 1; e < index.size() && everywhere; ++e) everywhere = index[e].count(name) > 0;
        if (everywhere) common.push_back(name);
    }
    if (common.empty()) {
        std::ostringstream msg;
        msg << "no municipality appears in every election (rows per election:";
        for (const auto* ds : datasets) msg << " " << ds->election_id << "=" << ds->rows.size();
        msg << ")";
        throw AlignmentError(msg.str());
    }

    AlignedPanel panel;
    for (const auto* ds : datasets) {
        panel.election_ids.push_back(ds->election_id);
        panel.parties.push_back(ds->parties);
    }
    for (const auto& name : common) {
        panel.municipality_ids.push_back(name);
        panel.names.push_back(index.front().at(name)->raw_name);
        std::vector<PartyVotes> votes;
        std::vector<VoteCount> eligible, total;
        double eligible_sum = 0.0;
        for (std::size_t e = 0; e < datasets.size(); ++e) {
            const ElectionRow* row = index[e].at(name);
            votes.push_back(row->party_votes);
            eligible.push_back(row->eligible_voters);
            total.push_back(row->total_votes);
            eligible_sum += static_cast<double>(row->eligible_voters);
        }
        const double weight = eligible_sum / static_cast<double>(datasets.size());
        if (!(weight > 0.0))
            throw ValidationError("municipality '" + name + "' has no eligible voters in any election");
        panel.voter_weight.push_back(weight);
        panel.votes.push_back(std::move(votes));
        panel.eligible.push_back(std::move(eligible));
        panel.total.push_back(std::move(total));
    }
    return panel;
}

AlignedPanel align_panel(const std::vector<ElectionDataset>& datasets) {
    if (datasets.size() != 5)
        throw AlignmentError("expected 5 election datasets, got " + std::to_string(datasets.size()));
    for (const auto& ds : datasets)
        if (ds.rows.empty())
            throw AlignmentError("election " + std::to_string(ds.election_id) + " has no rows");
    return align_datasets(datasets);
}

std::vector<BlocVector> bloc_vote_shares(const AlignedPanel& panel, const BlocMapping& mapping,
                                         int election_id) {
    const std::size_t e = panel.election_position(election_id);
    std::vector<BlocVector> shares(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
        BlocVector counts{};
        VoteCount denominator = 0;
        for (const auto& [party, v] : panel.votes[i][e]) {
            denominator += v;
            const Bloc bloc = mapping.bloc_of(party);
            if (bloc != Bloc::Other) counts[static_cast<std::size_t>(bloc)] += static_cast<double>(v);
        }
        if (denominator == 0)
            throw ValidationError("municipality '" + panel.municipality_ids[i] + "' has zero votes in election " +
                                  std::to_string(election_id));
        for (std::size_t b = 0; b < kNumBlocs; ++b) shares[i][b] = counts[b] / static_cast<double>(denominator);
    }
    return shares;
}

std::vector<BlocVector> mean_bloc_shares(const AlignedPanel& panel, const BlocMapping& mapping) {
    std::vector<BlocVector> mean(panel.size(), BlocVector{});
    for (const int id : panel.election_ids) {
        const auto shares = bloc_vote_shares(panel, mapping, id);
        for (std::size_t i = 0; i < panel.size(); ++i)
            for (std::size_t b = 0; b < kNumBlocs; ++b) mean[i][b] += shares[i][b];
    }
    const double count = static_cast<double>(panel.election_count());
    for (auto& row : mean)
        for (double& v : row) v /= count;
    return mean;
}

}  // namespace cantons
