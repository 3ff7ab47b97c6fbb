// Sparse multivariate polynomials over Z with arbitrary-precision
// coefficients.  Only used to compute and evaluate the universal Witt-vector
// sum/product/negation polynomials, where intermediate coefficients and
// evaluation values exceed 64 bits.
#ifndef KMSYM_ZPOLY_HPP
#define KMSYM_ZPOLY_HPP

#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kmsym/errors.hpp"

namespace kmsym {

using BigInt = boost::multiprecision::cpp_int;

class ZPoly {
public:
    using Exps = std::vector<uint32_t>;
    using TermMap = std::map<Exps, BigInt>;

    explicit ZPoly(size_t nvars) : nvars_(nvars) {}
    ZPoly(size_t nvars, TermMap terms) : nvars_(nvars), terms_(std::move(terms)) {}

    static ZPoly constant(size_t nvars, BigInt c);
    static ZPoly variable(size_t nvars, size_t index);

    size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    ZPoly operator+(const ZPoly& o) const;
    ZPoly operator-(const ZPoly& o) const;
    ZPoly operator-() const;
    ZPoly operator*(const ZPoly& o) const;
    ZPoly pow(uint64_t e) const;
    ZPoly scaled(const BigInt& c) const;

    // Exact division by an integer; throws InternalError on a nonzero remainder.
    ZPoly divide_exact(const BigInt& d) const;

    BigInt eval(const std::vector<BigInt>& args) const;
    ZPoly compose(const std::vector<ZPoly>& args) const;

    bool operator==(const ZPoly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
    bool operator!=(const ZPoly& o) const { return !(*this == o); }

private:
    size_t nvars_;
    TermMap terms_;

    void add_term(const Exps& e, const BigInt& c);
};

}  // namespace kmsym

#endif
