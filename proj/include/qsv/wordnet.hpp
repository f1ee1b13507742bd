#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qsv::wordnet {

enum class Pos : std::uint8_t { Noun, Verb };

/// Offset used for the per-POS virtual root. WNDB offsets have 8 decimal
/// digits, so this value cannot collide with a real synset.
inline constexpr std::uint32_t kVirtualRootOffset = 0xFFFFFFFFu;

struct SynsetKey {
    Pos pos = Pos::Noun;
    std::uint32_t offset = 0;

    bool is_virtual_root() const { return offset == kVirtualRootOffset; }
    auto operator<=>(const SynsetKey&) const = default;
};

struct Synset {
    SynsetKey key;
    std::vector<std::string> lemmas;
    std::vector<SynsetKey> hypernyms;
};

/// Immutable noun/verb hypernym taxonomy built by parse_wndb.
class SynsetGraph {
public:
    static SynsetKey virtual_root(Pos pos) { return {pos, kVirtualRootOffset}; }

    bool contains(SynsetKey key) const;
    const Synset& synset(SynsetKey key) const;
    /// Number of parsed synsets, virtual roots excluded.
    std::size_t size() const { return synsets_.size() - 2; }
    /// Every synset, virtual roots included.
    const std::map<SynsetKey, Synset>& synsets() const { return synsets_; }

    /// Synsets for a lowercase lemma, in index-file sense order. Spaces in
    /// the lemma are matched against WNDB underscores.
    const std::vector<SynsetKey>& lookup(Pos pos, std::string_view lemma) const;

    /// Shortest hypernym path to the virtual root, counting both ends.
    int depth(SynsetKey key) const;

    /// The key itself plus every synset reachable through hypernym links,
    /// including the virtual root.
    std::vector<SynsetKey> ancestors(SynsetKey key) const;

    /// Declared database version ("3.0"), or empty when none was found.
    const std::string& version() const { return version_; }

private:
    friend SynsetGraph parse_wndb(std::istream&, std::istream&, std::istream&, std::istream&);

    std::map<SynsetKey, Synset> synsets_;
    std::map<SynsetKey, int> depth_;
    std::map<std::pair<Pos, std::string>, std::vector<SynsetKey>> lemma_index_;
    std::string version_;
};

/// Builds the graph from WNDB data/index files. Throws DataError on a
/// malformed line (with file and line number), a dangling pointer, or a
/// hypernym cycle.
SynsetGraph parse_wndb(std::istream& data_noun, std::istream& index_noun,
                       std::istream& data_verb, std::istream& index_verb);

/// Reads data.noun, index.noun, data.verb and index.verb from a directory.
SynsetGraph load_wndb_directory(const std::string& dir);

/// Deepest common ancestor; ties go to the smaller offset, virtual root last.
/// Throws std::invalid_argument for keys of different parts of speech.
SynsetKey least_common_subsumer(const SynsetGraph& g, SynsetKey a, SynsetKey b);

/// Fewest hypernym links from `from` up to `to`, or -1 when `to` is not an
/// ancestor.
int hypernym_distance(const SynsetGraph& g, SynsetKey from, SynsetKey to);

/// 2 * depth(lcs) / (da + db), where da = depth(lcs) + hypernym_distance(a, lcs)
/// and likewise for b. On single-inheritance graphs da = depth(a).
double wu_palmer(const SynsetGraph& g, SynsetKey a, SynsetKey b);

}  // namespace qsv::wordnet
