#pragma once

#include <string>
#include <vector>

#include "toposlang/heyting.hpp"
#include "toposlang/rational.hpp"

namespace toposlang::heyting {

/// A linear subspace of the rational plane: {0}, a ray through the origin, or
/// the whole plane. Rays carry an integer direction in lowest terms with a
/// positive first nonzero coordinate, so equal rays compare equal.
class Subspace2D {
 public:
  enum class Dim { Zero = 0, Ray = 1, Plane = 2 };

  static Subspace2D zero() { return Subspace2D(Dim::Zero, 0, 0); }
  static Subspace2D plane() { return Subspace2D(Dim::Plane, 0, 0); }

  /// Ray spanned by a nonzero rational vector.
  static Subspace2D ray(const Rational& x, const Rational& y) {
    if (x == 0 && y == 0) throw InvalidStructureError("the zero vector does not span a ray");
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    Integer lcm = boost::multiprecision::lcm(denominator(x), denominator(y));
    Integer a = numerator(x) * (lcm / denominator(x));
    Integer b = numerator(y) * (lcm / denominator(y));
    Integer g = boost::multiprecision::gcd(a, b);
    if (g < 0) g = -g;
    a /= g;
    b /= g;
    if (a < 0 || (a == 0 && b < 0)) {
      a = -a;
      b = -b;
    }
    return Subspace2D(Dim::Ray, std::move(a), std::move(b));
  }

  Dim dim() const { return dim_; }
  const Integer& dx() const { return dx_; }
  const Integer& dy() const { return dy_; }

  bool operator==(const Subspace2D&) const = default;

  /// Intersection of subspaces.
  friend Subspace2D intersect(const Subspace2D& u, const Subspace2D& v) {
    if (u.dim_ == Dim::Zero || v.dim_ == Dim::Zero) return zero();
    if (u.dim_ == Dim::Plane) return v;
    if (v.dim_ == Dim::Plane) return u;
    return u == v ? u : zero();
  }

  /// Linear span of the union.
  friend Subspace2D span(const Subspace2D& u, const Subspace2D& v) {
    if (u.dim_ == Dim::Plane || v.dim_ == Dim::Plane) return plane();
    if (u.dim_ == Dim::Zero) return v;
    if (v.dim_ == Dim::Zero) return u;
    return u == v ? u : plane();
  }

  bool contained_in(const Subspace2D& v) const { return intersect(*this, v) == *this; }

  std::string label() const {
    switch (dim_) {
      case Dim::Zero: return "0";
      case Dim::Plane: return "plane";
      case Dim::Ray: return "ray(" + dx_.str() + "," + dy_.str() + ")";
    }
    return "?";
  }

 private:
  Subspace2D(Dim d, Integer x, Integer y) : dim_(d), dx_(std::move(x)), dy_(std::move(y)) {}

  Dim dim_;
  Integer dx_, dy_;
};

/// Bounded lattice {0, the given rays, plane} ordered by inclusion. Meets are
/// intersections and joins are spans. Not distributive once three distinct
/// rays are present.
class SubspaceLattice2D : public BoundedLattice {
 public:
  explicit SubspaceLattice2D(const std::vector<Subspace2D>& rays) : SubspaceLattice2D(Built{}, collect(rays)) {}

  const Subspace2D& subspace(ElemId a) const {
    check(a);
    return spaces_[a];
  }
  ElemId index_of(const Subspace2D& s) const { return find(s.label()); }

 private:
  struct Built {};
  SubspaceLattice2D(Built, std::vector<Subspace2D> spaces)
      : BoundedLattice(labels_of(spaces), order_of(spaces)), spaces_(std::move(spaces)) {
    // the order-derived tables must agree with the linear algebra
    for (ElemId a = 0; a < size(); ++a)
      for (ElemId b = 0; b < size(); ++b) {
        if (spaces_[meet(a, b)] != intersect(spaces_[a], spaces_[b]) ||
            spaces_[join(a, b)] != span(spaces_[a], spaces_[b]))
          throw InvalidStructureError("subspace family is not closed under intersection and span");
      }
  }

  static std::vector<Subspace2D> collect(const std::vector<Subspace2D>& rays) {
    std::vector<Subspace2D> out{Subspace2D::zero()};
    for (const auto& r : rays) {
      if (r.dim() != Subspace2D::Dim::Ray) throw InvalidStructureError("expected a ray, got " + r.label());
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    }
    out.push_back(Subspace2D::plane());
    return out;
  }
  static std::vector<std::string> labels_of(const std::vector<Subspace2D>& s) {
    std::vector<std::string> out;
    for (const auto& x : s) out.push_back(x.label());
    return out;
  }
  static std::vector<Bitset> order_of(const std::vector<Subspace2D>& s) {
    std::vector<Bitset> leq(s.size(), Bitset(s.size()));
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = 0; b < s.size(); ++b)
        if (s[a].contained_in(s[b])) leq[a].set(b);
    return leq;
  }

  std::vector<Subspace2D> spaces_;
};

}  // namespace toposlang::heyting
