#pragma once

#include <cstdint>
#include <vector>

#include "symmetra/errors.hpp"

namespace symmetra {

// The finite field GF(p^n), p^n <= 64.  The modulus is the lexicographically
// least monic irreducible polynomial of degree n, where candidates are
// ordered by the integer value sum_i c_i p^i of their non-leading
// coefficients.  Elements are encoded as integers sum_i c_i p^i standing for
// sum_i c_i alpha^i with alpha a root of the modulus.
struct FiniteField {
  int p = 0;  // characteristic
  int n = 0;  // extension degree
  int q = 0;  // p^n

  std::vector<int> modulus;    // little-endian c_0..c_n, monic; empty for n=1
  std::vector<int> basis;      // e_r = alpha^r (encoded), r = 0..n-1
  std::vector<int> dualBasis;  // trace-dual basis (encoded)

  std::vector<int> addTable, mulTable;  // flat q*q
  std::vector<int> negTable, invTable;  // invTable[0] = -1
  std::vector<int> traceTable;          // values in 0..p-1

  int add(int a, int b) const { return addTable[a * q + b]; }
  int sub(int a, int b) const { return addTable[a * q + negTable[b]]; }
  int mul(int a, int b) const { return mulTable[a * q + b]; }
  int neg(int a) const { return negTable[a]; }
  int inv(int a) const;  // throws Error on 0
  int trace(int a) const { return traceTable[a]; }
  int pow(int a, uint64_t k) const;
};

// Builds GF(q).  Throws NotPrime when q is not a prime power and TooLarge
// when q exceeds 64.
FiniteField buildField(int q);

// Convenience overload for GF(p^n) given p and n.
FiniteField buildField(int p, int n);

}  // namespace symmetra
