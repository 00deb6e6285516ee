#include "sbn/bits.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sbn {

std::uint64_t dec(const BitVec& v) {
    if (v.size() > 63) throw std::invalid_argument("dec: vector longer than 63 bits");
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > 1) throw std::invalid_argument("dec: entries must be 0 or 1");
        k |= static_cast<std::uint64_t>(v[i]) << i;
    }
    return k;
}

BitVec bin(std::uint64_t k, int n) {
    if (n < 0 || n > 63) throw std::out_of_range("bin: width out of range");
    if (n < 63 && k >= (1ULL << n)) throw std::out_of_range("bin: value does not fit width");
    BitVec v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = static_cast<std::uint8_t>((k >> i) & 1);
    return v;
}

int hamming(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
    int h = 0;
    for (std::size_t i = 0; i < a.size(); ++i) h += (a[i] != b[i]) ? 1 : 0;
    return h;
}

int largest_set_index(const BitVec& z) {
    for (std::size_t i = z.size(); i > 0; --i)
        if (z[i - 1]) return static_cast<int>(i);
    return 0;
}

namespace {

std::uint64_t gray(std::uint64_t k) { return k ^ (k >> 1); }

} // namespace

GrayCode sharing_code(int s) {
    if (s < 1 || s > 20) throw std::invalid_argument("sharing_code: s out of range");
    // Reflected Gray sequence reversed so the walk starts at (1,0,...,0) and
    // ends at 0; bit order flipped to keep the start one-hot in bit 1.
    GrayCode code;
    code.reserve(1ULL << s);
    const std::uint64_t count = 1ULL << s;
    for (std::uint64_t t = 0; t < count; ++t) {
        BitVec raw = bin(gray(count - 1 - t), s);
        std::reverse(raw.begin(), raw.end());
        code.push_back(std::move(raw));
    }
    return code;
}

std::vector<CodeProperty> validate_partial_codes(const PartialCodeSet& set) {
    std::vector<CodeProperty> out;
    const int m = set.m, b = set.b;
    auto fail = [&](const std::string& name, const std::string& why) {
        out.push_back({name, false, why});
    };
    auto pass = [&](const std::string& name) { out.push_back({name, true, ""}); };

    if (m < 1 || b < 0 || b > m) {
        fail("shape", "invalid m or b");
        return out;
    }
    const std::size_t n_codes = 1ULL << b;
    const std::size_t code_len = 1ULL << (m - b);
    bool shape_ok = set.codes.size() == n_codes;
    for (const auto& c : set.codes) {
        if (c.size() != code_len) shape_ok = false;
        for (const auto& v : c)
            if (v.size() != static_cast<std::size_t>(m)) shape_ok = false;
    }
    if (!shape_ok) {
        fail("shape", "expected 2^b codes of 2^(m-b) vectors of width m");
        return out;
    }
    pass("shape");

    // 1: each code is a Gray path
    bool adj = true;
    std::string adj_why;
    for (std::size_t i = 0; i < n_codes && adj; ++i)
        for (std::size_t k = 0; k + 1 < code_len; ++k)
            if (hamming(set.codes[i][k], set.codes[i][k + 1]) != 1) {
                adj = false;
                adj_why = "code " + std::to_string(i + 1) + " step " + std::to_string(k + 1);
                break;
            }
    adj ? pass("gray_path") : fail("gray_path", adj_why);

    // 2: initial states distinct and forming a b-subcube
    {
        std::set<std::uint64_t> inits;
        for (const auto& c : set.codes) inits.insert(dec(c[0]));
        if (inits.size() != n_codes) {
            fail("initial_subcube", "initial states not distinct");
        } else {
            int varying = 0;
            for (int pos = 0; pos < m; ++pos) {
                bool all0 = true, all1 = true;
                for (const auto& c : set.codes) {
                    (c[0][pos] ? all0 : all1) = false;
                }
                if (!all0 && !all1) ++varying;
            }
            if (varying != b)
                fail("initial_subcube",
                     std::to_string(varying) + " varying positions, expected " + std::to_string(b));
            else
                pass("initial_subcube");
        }
    }

    // 3: code 1 ends at zero
    if (largest_set_index(set.codes[0].back()) == 0)
        pass("first_code_ends_at_zero");
    else
        fail("first_code_ends_at_zero", "last state of code 1 is not the zero vector");

    // 4: partition of {0,1}^m
    {
        std::set<std::uint64_t> seen;
        bool dup = false;
        for (const auto& c : set.codes)
            for (const auto& v : c)
                if (!seen.insert(dec(v)).second) dup = true;
        if (dup || seen.size() != (1ULL << m))
            fail("partition", dup ? "repeated state" : "states missing");
        else
            pass("partition");
    }

    // 5: per-step switched bits distinct across codes unless states adjacent
    {
        bool ok = true;
        std::string why;
        for (std::size_t k = 0; k + 1 < code_len && ok; ++k)
            for (std::size_t i = 0; i < n_codes && ok; ++i)
                for (std::size_t r = i + 1; r < n_codes; ++r) {
                    int bi = -1, br = -1;
                    for (int pos = 0; pos < m; ++pos) {
                        if (set.codes[i][k][pos] != set.codes[i][k + 1][pos]) bi = pos;
                        if (set.codes[r][k][pos] != set.codes[r][k + 1][pos]) br = pos;
                    }
                    if (bi == br && hamming(set.codes[i][k], set.codes[r][k]) != 1) {
                        ok = false;
                        why = "codes " + std::to_string(i + 1) + "," + std::to_string(r + 1) +
                              " clash at step " + std::to_string(k + 1);
                        break;
                    }
                }
        ok ? pass("independent_steps") : fail("independent_steps", why);
    }
    return out;
}

bool partial_codes_ok(const PartialCodeSet& set) {
    for (const auto& p : validate_partial_codes(set))
        if (!p.pass) return false;
    return true;
}

namespace {

// Depth-first search for a PartialCodeSet. States are m-bit masks; the
// initial states are the subcube {bit 1 = 1, positions in V free, rest 0}
// so that (1,0,...,0) leads code 1 and the zero vector stays available as
// the terminal state of code 1.
struct CodeSearch {
    int m, b;
    std::size_t n_codes, code_len;
    std::vector<std::vector<std::uint64_t>> codes;
    std::vector<bool> used;

    bool extend(std::size_t k, std::size_t ci) {
        if (ci == n_codes) return fill_step(k + 1);
        const std::uint64_t cur = codes[ci][k - 1];
        for (int bit = 0; bit < m; ++bit) {
            const std::uint64_t nxt = cur ^ (1ULL << bit);
            if (used[nxt]) continue;
            // last state of code 1 must be zero, and zero may only be there
            const bool last = (k == code_len - 1);
            if (nxt == 0 && !(ci == 0 && last)) continue;
            if (ci == 0 && last && nxt != 0) continue;
            bool clash = false;
            for (std::size_t r = 0; r < ci; ++r) {
                const std::uint64_t prev = codes[r][k - 1];
                const int rbit = [&] {
                    std::uint64_t diff = prev ^ codes[r][k];
                    int p = 0;
                    while (!((diff >> p) & 1)) ++p;
                    return p;
                }();
                if (rbit == bit && __builtin_popcountll(prev ^ cur) != 1) {
                    clash = true;
                    break;
                }
            }
            if (clash) continue;
            codes[ci].push_back(nxt);
            used[nxt] = true;
            if (extend(k, ci + 1)) return true;
            used[nxt] = false;
            codes[ci].pop_back();
        }
        return false;
    }

    bool fill_step(std::size_t k) {
        if (k == code_len) return true;
        return extend(k, 0);
    }
};

} // namespace

PartialCodeSet partial_codes(int m, int b) {
    if (m > 6) throw std::invalid_argument("partial_codes: m > 6 unsupported");
    if (b < 1 || m != (1 << (b - 1)) + b)
        throw std::invalid_argument("partial_codes: need m = 2^(b-1)+b");

    static std::map<std::pair<int, int>, PartialCodeSet> cache;
    auto it = cache.find({m, b});
    if (it != cache.end()) return it->second;

    PartialCodeSet set;
    set.m = m;
    set.b = b;
    if (m == 2 && b == 1) {
        set.codes = {{{1, 0}, {0, 0}}, {{1, 1}, {0, 1}}};
    } else {
        // initial subcube: bit 1 = 1 fixed, b of the remaining positions vary
        const std::size_t n_codes = 1ULL << b;
        std::vector<int> vpos;
        for (int p = 1; p <= b; ++p) vpos.push_back(p); // positions 2..b+1 vary
        CodeSearch cs;
        cs.m = m;
        cs.b = b;
        cs.n_codes = n_codes;
        cs.code_len = 1ULL << (m - b);
        cs.used.assign(1ULL << m, false);
        cs.codes.assign(n_codes, {});
        for (std::size_t c = 0; c < n_codes; ++c) {
            std::uint64_t init = 1; // bit 1 set
            for (int t = 0; t < b; ++t)
                if ((c >> t) & 1) init |= 1ULL << vpos[t];
            cs.codes[c].push_back(init);
            cs.used[init] = true;
        }
        if (!cs.fill_step(1)) throw std::runtime_error("partial_codes: search failed");
        for (const auto& c : cs.codes) {
            std::vector<BitVec> vec;
            for (std::uint64_t st : c) vec.push_back(bin(st, m));
            set.codes.push_back(std::move(vec));
        }
    }
    if (!partial_codes_ok(set)) throw std::runtime_error("partial_codes: invalid result");
    cache[{m, b}] = set;
    return set;
}

std::string format_bits(const BitVec& v) {
    std::string s;
    s.reserve(v.size());
    for (auto bit : v) s.push_back(bit ? '1' : '0');
    return s;
}

} // namespace sbn
