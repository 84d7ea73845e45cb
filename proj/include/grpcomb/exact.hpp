#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace grpcomb {

using BigInt = boost::multiprecision::cpp_int;

BigInt big_pow(const BigInt &base, unsigned exp);

// One checked inequality with both sides printed exactly.
struct Inequality {
  std::string name;
  std::string lhs;
  std::string rhs;
  bool holds = true;
};

// lnum/lden <= rnum/rden, denominators positive
Inequality check_le(std::string name, const BigInt &lnum, const BigInt &lden,
                    const BigInt &rnum, const BigInt &rden);
inline Inequality check_le(std::string name, const BigInt &lhs, const BigInt &rhs)
{
  return check_le(std::move(name), lhs, 1, rhs, 1);
}
// for bounds involving logarithms or roots; compared in long double with no slack
Inequality check_le_real(std::string name, long double lhs, long double rhs);

std::string rational_string(const BigInt &num, const BigInt &den);

} // namespace grpcomb
