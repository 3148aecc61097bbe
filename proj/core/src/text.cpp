#include "pse/text.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "pse/error.hpp"

namespace pse {
namespace {

#include "stopwords.inc"

struct StopwordTable {
    std::vector<std::string> list;
    std::unordered_set<std::string_view> lookup;

    StopwordTable()
    {
        std::string_view rest = kEmbeddedStopwords;
        while (!rest.empty()) {
            auto nl = rest.find('\n');
            auto line = rest.substr(0, nl);
            if (!line.empty() && line.back() == '\r') {
                line.remove_suffix(1);
            }
            if (!line.empty()) {
                list.emplace_back(line);
            }
            rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        }
        for (const auto& w : list) {
            lookup.insert(w);
        }
    }
};

const StopwordTable& stopwords()
{
    static const StopwordTable table;
    return table;
}

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one UTF-8 sequence starting at `pos`; advances `pos`.
// Malformed bytes decode to kInvalid and consume a single byte.
char32_t decode_utf8(std::string_view s, std::size_t& pos)
{
    auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + extra >= s.size()) {
        ++pos;
        return kInvalid;
    }
    for (int i = 1; i <= extra; ++i) {
        auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += extra + 1;
    return cp;
}

void append_utf8(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// Letters, digits and combining marks count as word characters. Non-ASCII
// punctuation, symbol, space and emoji blocks are delimiters.
bool is_word_char(char32_t cp)
{
    if (cp == kInvalid) {
        return false;
    }
    if (cp < 0x80) {
        return in(cp, '0', '9') || in(cp, 'a', 'z') || in(cp, 'A', 'Z');
    }
    if (in(cp, 0x80, 0xBF)) {
        return cp == 0xAA || cp == 0xB5 || cp == 0xBA || cp == 0xB2 || cp == 0xB3 || cp == 0xB9
               || in(cp, 0xBC, 0xBE);
    }
    if (cp == 0xD7 || cp == 0xF7) {
        return false;
    }
    if (in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF) || in(cp, 0x2190, 0x2BFF)
        || in(cp, 0x2E00, 0x2E7F) || in(cp, 0x3000, 0x303F) || in(cp, 0xFE00, 0xFE1F)
        || in(cp, 0xFE30, 0xFE4F) || in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20)
        || in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65) || in(cp, 0x1F000, 0x1FAFF)
        || cp == 0xFEFF || in(cp, 0xFFF0, 0xFFFF)) {
        return false;
    }
    return true;
}

// Simple (one-to-one) lowercase mapping for ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic. Other scripts pass through unchanged.
char32_t to_lower(char32_t cp)
{
    if (in(cp, 'A', 'Z')) {
        return cp + 0x20;
    }
    if (cp < 0x80) {
        return cp;
    }
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) {
        return cp + 0x20;
    }
    if (cp == 0x130) {
        return 'i';
    }
    if ((in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) && cp % 2 == 0) {
        return cp + 1;
    }
    if ((in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) && cp % 2 == 1) {
        return cp + 1;
    }
    if (cp == 0x178) {
        return 0xFF;
    }
    if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) {
        return cp + 0x20;
    }
    if (cp == 0x386) {
        return 0x3AC;
    }
    if (in(cp, 0x388, 0x38A)) {
        return cp + 0x25;
    }
    if (cp == 0x38C) {
        return 0x3CC;
    }
    if (in(cp, 0x38E, 0x38F)) {
        return cp + 0x3F;
    }
    if (in(cp, 0x410, 0x42F)) {
        return cp + 0x20;
    }
    if (in(cp, 0x400, 0x40F)) {
        return cp + 0x50;
    }
    if ((in(cp, 0x460, 0x481) || in(cp, 0x48A, 0x4BF)) && cp % 2 == 0) {
        return cp + 1;
    }
    return cp;
}

}  // namespace

std::string lowercase(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = pos;
        char32_t cp = decode_utf8(text, pos);
        if (cp == kInvalid) {
            out.append(text.substr(start, pos - start));
        } else {
            append_utf8(out, to_lower(cp));
        }
    }
    return out;
}

bool is_stopword(std::string_view term) { return stopwords().lookup.contains(term); }

const std::vector<std::string>& stopword_list() { return stopwords().list; }

TermSeq tokenize(std::string_view text, bool remove_stopwords)
{
    TermSeq out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            if (!remove_stopwords || !is_stopword(current)) {
                out.push_back(std::move(current));
            }
            current.clear();
        }
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = decode_utf8(text, pos);
        if (is_word_char(cp)) {
            append_utf8(current, to_lower(cp));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

double UnigramLM::prob(const std::string& term) const
{
    auto it = probs_.find(term);
    return it == probs_.end() ? 0.0 : it->second;
}

UnigramLM build_lm(const TermSeq& terms)
{
    if (terms.empty()) {
        throw Error("cannot estimate LM from empty text");
    }
    std::map<std::string, std::uint64_t> counts;
    for (const auto& t : terms) {
        ++counts[t];
    }
    UnigramLM lm;
    lm.total_terms_ = terms.size();
    const auto n = static_cast<double>(terms.size());
    for (const auto& [term, c] : counts) {
        lm.probs_.emplace(term, static_cast<double>(c) / n);
    }
    return lm;
}

BackgroundLM BackgroundLM::from_counts(std::map<std::string, std::uint64_t> counts)
{
    std::uint64_t total = 0;
    for (const auto& [term, c] : counts) {
        if (c == 0) {
            throw Error("background count for '" + term + "' must be positive");
        }
        total += c;
    }
    if (total == 0) {
        throw Error("cannot estimate background model from an empty corpus");
    }
    BackgroundLM bg;
    bg.total_tokens_ = total;
    const double denom = static_cast<double>(total) + static_cast<double>(counts.size()) + 1.0;
    bg.oov_prob_ = 1.0 / denom;
    bg.probs_.reserve(counts.size());
    for (const auto& [term, c] : counts) {
        bg.probs_.emplace(term, (static_cast<double>(c) + 1.0) / denom);
    }
    bg.counts_ = std::move(counts);
    return bg;
}

BackgroundLM BackgroundLM::from_probabilities(const std::map<std::string, double>& probs, double oov_prob)
{
    if (!(oov_prob > 0.0 && oov_prob <= 1.0)) {
        throw Error("unseen-term probability must lie in (0,1]");
    }
    BackgroundLM bg;
    bg.oov_prob_ = oov_prob;
    for (const auto& [term, p] : probs) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw Error("background probability for '" + term + "' must lie in (0,1]");
        }
        bg.probs_.emplace(term, p);
    }
    return bg;
}

double BackgroundLM::prob(const std::string& term) const
{
    auto it = probs_.find(term);
    return it == probs_.end() ? oov_prob_ : it->second;
}

BackgroundLM build_background(std::span<const TermSeq> stream)
{
    std::map<std::string, std::uint64_t> counts;
    for (const auto& seq : stream) {
        for (const auto& t : seq) {
            ++counts[t];
        }
    }
    return BackgroundLM::from_counts(std::move(counts));
}

void save_background(const BackgroundLM& lm, const std::string& path)
{
    if (lm.counts().empty()) {
        throw Error("background model has no counts to save");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << "#total_tokens\t" << lm.total_tokens() << '\n';
    for (const auto& [term, c] : lm.counts()) {
        out << term << '\t' << c << '\n';
    }
    if (!out) {
        throw Error("write failed for '" + path + "'");
    }
}

BackgroundLM load_background(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open background file '" + path + "'");
    }
    std::map<std::string, std::uint64_t> counts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw Error(path + ":" + std::to_string(line_no) + ": expected 'term<TAB>count'");
        }
        std::uint64_t c = 0;
        try {
            std::size_t used = 0;
            c = std::stoull(line.substr(tab + 1), &used);
            if (used != line.size() - tab - 1) {
                throw std::invalid_argument("trailing");
            }
        } catch (const std::exception&) {
            throw Error(path + ":" + std::to_string(line_no) + ": invalid count");
        }
        counts[line.substr(0, tab)] += c;
    }
    return BackgroundLM::from_counts(std::move(counts));
}

}  // namespace pse
