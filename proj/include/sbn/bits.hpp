#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Bit-vector conventions used throughout:
//   - a state over n binary units is a vector (x_1,...,x_n) of 0/1 bytes,
//   - bit 1 is the LEAST significant: dec(x) = sum_i 2^(i-1) x_i,
//   - kernel rows/columns are ordered by ascending dec().

namespace sbn {

using BitVec = std::vector<std::uint8_t>;

// dec((1,0,1)) = 5
std::uint64_t dec(const BitVec& v);

// bin(5,3) = (1,0,1); throws std::out_of_range if k >= 2^n
BitVec bin(std::uint64_t k, int n);

// Hamming distance; throws std::invalid_argument on length mismatch.
int hamming(const BitVec& a, const BitVec& b);

// Largest index i (1-based) with z_i = 1, or 0 for the zero vector.
int largest_set_index(const BitVec& z);

// Gray walk over {0,1}^s: starts at (1,0,...,0), ends at the zero vector,
// consecutive entries differ in exactly one bit, all 2^s states appear.
using GrayCode = std::vector<BitVec>;
GrayCode sharing_code(int s);

// 2^b disjoint Gray codes of length 2^(m-b) jointly covering {0,1}^m, with
// structural properties that let all codes advance inside a single layer.
struct PartialCodeSet {
    int m = 0;
    int b = 0;
    std::vector<std::vector<BitVec>> codes;
};

struct CodeProperty {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Checks the five structural properties:
//  1. each code is a Gray path (consecutive entries differ in one bit),
//  2. the initial states are distinct and form a b-dimensional subcube,
//  3. code 1 ends at the zero vector,
//  4. the codes partition {0,1}^m,
//  5. at every step, two distinct codes switch different bits unless their
//     current states are Hamming distance 1 apart.
std::vector<CodeProperty> validate_partial_codes(const PartialCodeSet& set);
bool partial_codes_ok(const PartialCodeSet& set);

// Builds a valid PartialCodeSet for m = 2^(b-1)+b, m <= 6 (i.e. (m,b) in
// {(2,1),(4,2)}). The (2,1) set is the known reference pair; (4,2) is found
// by backtracking search and memoized. Throws std::invalid_argument for
// unsupported (m,b).
PartialCodeSet partial_codes(int m, int b);

std::string format_bits(const BitVec& v); // "101" style, bit 1 first

} // namespace sbn
