#include "qsv/wordnet.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qsv/errors.hpp"

namespace qsv::wordnet {

namespace {

char pos_char(Pos pos) { return pos == Pos::Noun ? 'n' : 'v'; }

std::string file_label(const char* kind, Pos pos) {
    return std::string(kind) + (pos == Pos::Noun ? ".noun" : ".verb");
}

[[noreturn]] void malformed(const std::string& file, std::size_t line, const std::string& what) {
    throw DataError(file + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out, base);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

std::string lowercase_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

// License header lines start with two spaces.
bool is_header(const std::string& line) { return line.size() >= 2 && line[0] == ' ' && line[1] == ' '; }

void scan_version(const std::string& line, std::string& version) {
    static const std::regex kVersion(R"(WordNet (\d+\.\d+))");
    std::smatch m;
    if (version.empty() && std::regex_search(line, m, kVersion)) version = m[1];
}

void parse_data(std::istream& in, Pos pos, std::map<SynsetKey, Synset>& synsets, std::string& version) {
    const std::string label = file_label("data", pos);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_header(line)) {
            scan_version(line, version);
            continue;
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        const auto bar = line.find('|');
        const auto fields = split_ws(std::string_view(line).substr(0, bar));
        if (fields.size() < 6) malformed(label, lineno, "too few fields");

        Synset s;
        s.key.pos = pos;
        if (fields[0].size() != 8 || !parse_number(fields[0], s.key.offset)) {
            malformed(label, lineno, "bad synset offset");
        }
        const char expected = pos_char(pos);
        if (fields[2].size() != 1 || fields[2][0] != expected) malformed(label, lineno, "unexpected synset type");

        std::size_t w_cnt = 0;
        if (!parse_number(fields[3], w_cnt, 16) || w_cnt == 0) malformed(label, lineno, "bad word count");
        std::size_t i = 4;
        if (fields.size() < i + 2 * w_cnt + 1) malformed(label, lineno, "truncated word list");
        for (std::size_t w = 0; w < w_cnt; ++w, i += 2) s.lemmas.push_back(lowercase_ascii(fields[i]));

        std::size_t p_cnt = 0;
        if (!parse_number(fields[i], p_cnt)) malformed(label, lineno, "bad pointer count");
        ++i;
        if (fields.size() < i + 4 * p_cnt) malformed(label, lineno, "truncated pointer list");
        for (std::size_t p = 0; p < p_cnt; ++p, i += 4) {
            const auto symbol = fields[i];
            std::uint32_t target = 0;
            if (fields[i + 1].size() != 8 || !parse_number(fields[i + 1], target)) {
                malformed(label, lineno, "bad pointer offset");
            }
            if (symbol != "@" && symbol != "@i") continue;
            if (fields[i + 2].size() != 1 || fields[i + 2][0] != expected) {
                malformed(label, lineno, "hypernym pointer to another part of speech");
            }
            s.hypernyms.push_back({pos, target});
        }

        const SynsetKey key = s.key;
        if (!synsets.emplace(key, std::move(s)).second) malformed(label, lineno, "duplicate synset offset");
    }
}

void parse_index(std::istream& in, Pos pos, const std::map<SynsetKey, Synset>& synsets,
                 std::map<std::pair<Pos, std::string>, std::vector<SynsetKey>>& index, std::string& version) {
    const std::string label = file_label("index", pos);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_header(line)) {
            scan_version(line, version);
            continue;
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        const auto fields = split_ws(line);
        if (fields.size() < 6) malformed(label, lineno, "too few fields");
        if (fields[1].size() != 1 || fields[1][0] != pos_char(pos)) malformed(label, lineno, "unexpected part of speech");
        std::size_t synset_cnt = 0;
        std::size_t p_cnt = 0;
        if (!parse_number(fields[2], synset_cnt) || !parse_number(fields[3], p_cnt)) {
            malformed(label, lineno, "bad counts");
        }
        const std::size_t first_offset = 4 + p_cnt + 2;
        if (fields.size() != first_offset + synset_cnt) malformed(label, lineno, "field count does not match counts");

        auto& keys = index[{pos, lowercase_ascii(fields[0])}];
        for (std::size_t k = 0; k < synset_cnt; ++k) {
            SynsetKey key{pos, 0};
            if (!parse_number(fields[first_offset + k], key.offset)) malformed(label, lineno, "bad synset offset");
            if (!synsets.contains(key)) {
                malformed(label, lineno, "lemma points to unknown synset " + std::string(fields[first_offset + k]));
            }
            if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        }
    }
}

std::string describe(SynsetKey key) {
    if (key.is_virtual_root()) return std::string("<root:") + pos_char(key.pos) + ">";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08u", key.offset);
    return std::string(buf) + "-" + pos_char(key.pos);
}

}  // namespace

bool SynsetGraph::contains(SynsetKey key) const { return synsets_.contains(key); }

const Synset& SynsetGraph::synset(SynsetKey key) const {
    const auto it = synsets_.find(key);
    if (it == synsets_.end()) throw std::out_of_range("unknown synset " + describe(key));
    return it->second;
}

const std::vector<SynsetKey>& SynsetGraph::lookup(Pos pos, std::string_view lemma) const {
    static const std::vector<SynsetKey> kNone;
    std::string key(lemma);
    std::replace(key.begin(), key.end(), ' ', '_');
    const auto it = lemma_index_.find({pos, key});
    return it == lemma_index_.end() ? kNone : it->second;
}

int SynsetGraph::depth(SynsetKey key) const {
    const auto it = depth_.find(key);
    if (it == depth_.end()) throw std::out_of_range("unknown synset " + describe(key));
    return it->second;
}

std::vector<SynsetKey> SynsetGraph::ancestors(SynsetKey key) const {
    std::set<SynsetKey> seen{key};
    std::deque<SynsetKey> queue{key};
    while (!queue.empty()) {
        const SynsetKey k = queue.front();
        queue.pop_front();
        for (const SynsetKey h : synset(k).hypernyms) {
            if (seen.insert(h).second) queue.push_back(h);
        }
    }
    return {seen.begin(), seen.end()};
}

SynsetGraph parse_wndb(std::istream& data_noun, std::istream& index_noun, std::istream& data_verb,
                       std::istream& index_verb) {
    SynsetGraph g;
    parse_data(data_noun, Pos::Noun, g.synsets_, g.version_);
    parse_data(data_verb, Pos::Verb, g.synsets_, g.version_);

    for (const Pos pos : {Pos::Noun, Pos::Verb}) {
        const SynsetKey root = SynsetGraph::virtual_root(pos);
        g.synsets_[root] = Synset{root, {}, {}};
    }
    for (auto& [key, s] : g.synsets_) {
        if (key.is_virtual_root()) continue;
        for (const SynsetKey h : s.hypernyms) {
            if (!g.synsets_.contains(h)) {
                throw DataError("dangling hypernym pointer from " + describe(key) + " to " + describe(h));
            }
        }
        if (s.hypernyms.empty()) s.hypernyms.push_back(SynsetGraph::virtual_root(key.pos));
    }

    // Minimum depth by iterative DFS; a grey node seen again is a cycle.
    enum class Mark : std::uint8_t { White, Grey, Black };
    std::map<SynsetKey, Mark> mark;
    for (const auto& [key, s] : g.synsets_) {
        if (mark[key] == Mark::Black) continue;
        std::vector<std::pair<SynsetKey, std::size_t>> stack{{key, 0}};
        mark[key] = Mark::Grey;
        while (!stack.empty()) {
            auto& [k, next] = stack.back();
            const auto& hypernyms = g.synsets_.at(k).hypernyms;
            if (next < hypernyms.size()) {
                const SynsetKey h = hypernyms[next++];
                Mark& m = mark[h];
                if (m == Mark::Grey) throw DataError("cyclic hypernymy through " + describe(h));
                if (m == Mark::White) {
                    m = Mark::Grey;
                    stack.emplace_back(h, 0);
                }
                continue;
            }
            int best = 0;
            for (const SynsetKey h : hypernyms) {
                const int d = g.depth_.at(h);
                if (best == 0 || d < best) best = d;
            }
            g.depth_[k] = best + 1;
            mark[k] = Mark::Black;
            stack.pop_back();
        }
    }

    parse_index(index_noun, Pos::Noun, g.synsets_, g.lemma_index_, g.version_);
    parse_index(index_verb, Pos::Verb, g.synsets_, g.lemma_index_, g.version_);
    return g;
}

SynsetGraph load_wndb_directory(const std::string& dir) {
    auto open = [&](const char* name) {
        std::ifstream in(dir + "/" + name, std::ios::binary);
        if (!in) throw DataError("cannot open WordNet file " + dir + "/" + name);
        return in;
    };
    auto dn = open("data.noun");
    auto in = open("index.noun");
    auto dv = open("data.verb");
    auto iv = open("index.verb");
    return parse_wndb(dn, in, dv, iv);
}

SynsetKey least_common_subsumer(const SynsetGraph& g, SynsetKey a, SynsetKey b) {
    if (a.pos != b.pos) throw std::invalid_argument("least_common_subsumer: synsets have different parts of speech");
    const auto ancestors_a = g.ancestors(a);
    const auto ancestors_b = g.ancestors(b);
    std::vector<SynsetKey> common;
    std::set_intersection(ancestors_a.begin(), ancestors_a.end(), ancestors_b.begin(), ancestors_b.end(),
                          std::back_inserter(common));
    // The virtual root is always shared and has the largest offset, so it
    // only wins when nothing deeper is.
    SynsetKey best = common.front();
    int best_depth = g.depth(best);
    for (const SynsetKey k : common) {
        const int d = g.depth(k);
        if (d > best_depth || (d == best_depth && k.offset < best.offset)) {
            best = k;
            best_depth = d;
        }
    }
    return best;
}

int hypernym_distance(const SynsetGraph& g, SynsetKey from, SynsetKey to) {
    std::map<SynsetKey, int> dist{{from, 0}};
    std::deque<SynsetKey> queue{from};
    while (!queue.empty()) {
        const SynsetKey k = queue.front();
        queue.pop_front();
        if (k == to) return dist.at(k);
        for (const SynsetKey h : g.synset(k).hypernyms) {
            if (dist.emplace(h, dist.at(k) + 1).second) queue.push_back(h);
        }
    }
    return -1;
}

double wu_palmer(const SynsetGraph& g, SynsetKey a, SynsetKey b) {
    if (a.pos != b.pos) throw std::invalid_argument("wu_palmer: synsets have different parts of speech");
    if (a == b) {
        (void)g.synset(a);
        return 1.0;
    }
    const SynsetKey lcs = least_common_subsumer(g, a, b);
    const int d = g.depth(lcs);
    // Depths are taken along the path through the subsumer; a shortest path
    // that bypasses it could otherwise be shorter than depth(lcs).
    const int da = d + hypernym_distance(g, a, lcs);
    const int db = d + hypernym_distance(g, b, lcs);
    return 2.0 * d / static_cast<double>(da + db);
}

}  // namespace qsv::wordnet
