#include "symmetra/field.hpp"

#include <algorithm>

namespace symmetra {

namespace {

bool isPrime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q) {
    if (p % q == 0) return false;
  }
  return true;
}

using Poly = std::vector<int>;  // little-endian coefficients mod p

int polyEval(const Poly& f, int x, int p) {
  int v = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) v = (v * x + *it) % p;
  return v;
}

// Remainder of f by a monic divisor d (both little endian).
Poly polyMod(Poly f, const Poly& d, int p) {
  const int dd = static_cast<int>(d.size()) - 1;
  for (int i = static_cast<int>(f.size()) - 1; i >= dd; --i) {
    const int c = f[i];
    if (c == 0) continue;
    for (int j = 0; j <= dd; ++j) {
      f[i - dd + j] = ((f[i - dd + j] - c * d[j]) % p + p) % p;
    }
  }
  f.resize(dd);
  return f;
}

Poly polyMul(const Poly& a, const Poly& b, int p) {
  Poly res(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      res[i + j] = (res[i + j] + a[i] * b[j]) % p;
    }
  }
  return res;
}

bool isZeroPoly(const Poly& f) {
  return std::all_of(f.begin(), f.end(), [](int c) { return c == 0; });
}

bool isIrreducible(const Poly& mod, int p, int n) {
  // No roots in F_p rules out degree 2 and 3 reducibility.
  for (int x = 0; x < p; ++x) {
    if (polyEval(mod, x, p) == 0) return false;
  }
  if (n <= 3) return true;
  // Trial division by every monic polynomial of degree 2..n/2.
  for (int dg = 2; dg <= n / 2; ++dg) {
    int count = 1;
    for (int i = 0; i < dg; ++i) count *= p;
    for (int tail = 0; tail < count; ++tail) {
      Poly d(dg + 1, 0);
      int t = tail;
      for (int i = 0; i < dg; ++i) {
        d[i] = t % p;
        t /= p;
      }
      d[dg] = 1;
      if (isZeroPoly(polyMod(mod, d, p))) return false;
    }
  }
  return true;
}

Poly decode(int a, int p, int n) {
  Poly f(n, 0);
  for (int i = 0; i < n; ++i) {
    f[i] = a % p;
    a /= p;
  }
  return f;
}

int encode(const Poly& f, int p) {
  int v = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) v = v * p + *it;
  return v;
}

// Inverse of an n x n matrix over F_p by Gauss-Jordan elimination.
std::vector<std::vector<int>> invertModP(std::vector<std::vector<int>> m,
                                         int p) {
  const int n = static_cast<int>(m.size());
  std::vector<std::vector<int>> inv(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  auto scalarInv = [&](int a) {
    for (int b = 1; b < p; ++b) {
      if (a * b % p == 1) return b;
    }
    throw Error("singular Gram matrix over F_p");
  };
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw Error("singular Gram matrix over F_p");
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    const int s = scalarInv(m[col][col]);
    for (int c = 0; c < n; ++c) {
      m[col][c] = m[col][c] * s % p;
      inv[col][c] = inv[col][c] * s % p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const int f = m[r][col];
      for (int c = 0; c < n; ++c) {
        m[r][c] = ((m[r][c] - f * m[col][c]) % p + p) % p;
        inv[r][c] = ((inv[r][c] - f * inv[col][c]) % p + p) % p;
      }
    }
  }
  return inv;
}

}  // namespace

int FiniteField::inv(int a) const {
  if (a == 0) throw Error("division by zero in GF(" + std::to_string(q) + ")");
  return invTable[a];
}

int FiniteField::pow(int a, uint64_t k) const {
  int r = 1;
  int base = a;
  while (k > 0) {
    if (k & 1) r = mul(r, base);
    base = mul(base, base);
    k >>= 1;
  }
  return r;
}

FiniteField buildField(int q) {
  if (q > 64) throw TooLarge("GF(" + std::to_string(q) + ") exceeds the q <= 64 limit");
  int p = 0, n = 0;
  for (int pp = 2; pp <= q; ++pp) {
    if (!isPrime(pp)) continue;
    int m = pp, k = 1;
    while (m < q) {
      m *= pp;
      ++k;
    }
    if (m == q) {
      p = pp;
      n = k;
      break;
    }
  }
  if (p == 0) throw NotPrime(std::to_string(q) + " is not a prime power");
  return buildField(p, n);
}

FiniteField buildField(int p, int n) {
  if (!isPrime(p)) throw NotPrime(std::to_string(p) + " is not prime");
  if (n < 1) throw Error("extension degree must be positive");
  int q = 1;
  for (int i = 0; i < n; ++i) {
    q *= p;
    if (q > 64) throw TooLarge("GF(p^n) exceeds the q <= 64 limit");
  }

  FiniteField f;
  f.p = p;
  f.n = n;
  f.q = q;

  if (n > 1) {
    // Least monic irreducible, candidates ordered by the integer value of
    // their non-leading coefficients.
    bool found = false;
    for (int v = 0; v < q && !found; ++v) {
      Poly cand = decode(v, p, n);
      cand.push_back(1);
      if (isIrreducible(cand, p, n)) {
        f.modulus = cand;
        found = true;
      }
    }
    if (!found) throw Error("no irreducible modulus found");
  }

  // Arithmetic tables.
  f.addTable.resize(q * q);
  f.mulTable.resize(q * q);
  f.negTable.resize(q);
  for (int a = 0; a < q; ++a) {
    const Poly fa = decode(a, p, n);
    Poly na(n);
    for (int i = 0; i < n; ++i) na[i] = (p - fa[i]) % p;
    f.negTable[a] = encode(na, p);
    for (int b = 0; b < q; ++b) {
      const Poly fb = decode(b, p, n);
      Poly sum(n);
      for (int i = 0; i < n; ++i) sum[i] = (fa[i] + fb[i]) % p;
      f.addTable[a * q + b] = encode(sum, p);
      Poly prod = polyMul(fa, fb, p);
      if (n > 1) {
        prod = polyMod(prod, f.modulus, p);
      } else {
        prod = Poly{prod[0] % p};
      }
      prod.resize(n, 0);
      f.mulTable[a * q + b] = encode(prod, p);
    }
  }

  f.invTable.assign(q, -1);
  for (int a = 1; a < q; ++a) {
    for (int b = 1; b < q; ++b) {
      if (f.mul(a, b) == 1) {
        f.invTable[a] = b;
        break;
      }
    }
    if (f.invTable[a] < 0) throw Error("field element without inverse");
  }

  // Trace via Frobenius powers; the result must land in the prime subfield.
  f.traceTable.resize(q);
  for (int a = 0; a < q; ++a) {
    int t = 0;
    int frob = a;
    for (int k = 0; k < n; ++k) {
      t = f.add(t, frob);
      frob = f.pow(frob, static_cast<uint64_t>(p));
    }
    if (t >= p) throw Error("trace left the prime subfield");
    f.traceTable[a] = t;
  }

  // Power basis and its trace-dual.
  f.basis.resize(n);
  for (int r = 0; r < n; ++r) {
    Poly e(n, 0);
    e[r] = 1;
    f.basis[r] = encode(e, p);
  }
  std::vector<std::vector<int>> gram(n, std::vector<int>(n));
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      gram[r][s] = f.trace(f.mul(f.basis[r], f.basis[s]));
    }
  }
  const std::vector<std::vector<int>> gramInv = invertModP(gram, p);
  f.dualBasis.resize(n);
  for (int r = 0; r < n; ++r) {
    int acc = 0;
    for (int s = 0; s < n; ++s) {
      // Scalar c in F_p embeds as the encoded element c.
      acc = f.add(acc, f.mul(gramInv[r][s] % p, f.basis[s]));
    }
    f.dualBasis[r] = acc;
  }
  for (int r = 0; r < n; ++r) {
    for (int s = 0; s < n; ++s) {
      if (f.trace(f.mul(f.dualBasis[r], f.basis[s])) != (r == s ? 1 : 0)) {
        throw Error("trace-dual basis verification failed");
      }
    }
  }
  return f;
}

}  // namespace symmetra
