#include <cstdio>

#include "grpcomb/exact.hpp"

namespace grpcomb {

BigInt big_pow(const BigInt &base, unsigned exp)
{
  BigInt r = 1, b = base;
  while (exp) {
    if (exp & 1)
      r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

namespace {

// long integers are abbreviated; the comparison itself is always exact
std::string int_string(const BigInt &x)
{
  std::string s = x.str();
  size_t digits = s.size() - (s[0] == '-');
  if (digits <= 40)
    return s;
  size_t lead = s[0] == '-' ? 1 : 0;
  return s.substr(0, lead + 1) + "." + s.substr(lead + 1, 8) + "e" + std::to_string(digits - 1);
}

} // namespace

std::string rational_string(const BigInt &num, const BigInt &den)
{
  if (den == 1)
    return int_string(num);
  return int_string(num) + "/" + int_string(den);
}

Inequality check_le(std::string name, const BigInt &lnum, const BigInt &lden,
                    const BigInt &rnum, const BigInt &rden)
{
  Inequality q;
  q.name = std::move(name);
  q.lhs = rational_string(lnum, lden);
  q.rhs = rational_string(rnum, rden);
  q.holds = lnum * rden <= rnum * lden;
  return q;
}

Inequality check_le_real(std::string name, long double lhs, long double rhs)
{
  char buf[64];
  Inequality q;
  q.name = std::move(name);
  std::snprintf(buf, sizeof buf, "%.12Lg", lhs);
  q.lhs = buf;
  std::snprintf(buf, sizeof buf, "%.12Lg", rhs);
  q.rhs = buf;
  q.holds = lhs <= rhs;
  return q;
}

} // namespace grpcomb
