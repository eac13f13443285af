// Catalogue of increment laws with analytic truncated second moments.
//
// Every family is symmetric, has Cov(X) = I, and is isotropic in the sense
// that E[X X^T 1{|X| <= t}] is a multiple of the identity. The truncated
// moments are therefore carried as one radial function
//     within(t) = E[|X|^2 1{|X| <= t}],      A(t)^2 = within(t) / d * I,
// together with the tail functional tau(t) = E[|X|^2 1{|X| >= t}].
//
// Atom ladders put symmetric atoms at radii t_k = exp(exp(k)), k >= k0, so
// LL(t_k) = k. The pair weights satisfy t_k^2 p_k = c (1/k - 1/(k+1))
// (atom_ladder) or 1/sqrt(k) - 1/sqrt(k+1) (atom_ladder_fat), hence
// tau(t_k) LL(t_k) equals c, resp. sqrt(k). A uniform base component
// carries the remaining variance. Analytic functions use the full infinite
// ladder; the sampler drops rungs whose probability is below 1e-300.
#pragma once

#include "delab/rng.hpp"
#include "delab/sym_psd.hpp"

#include <span>
#include <string>
#include <vector>

namespace delab {

enum class Family { gaussian_iso, rademacher_product, uniform_cube, atom_ladder, atom_ladder_fat };
enum class DirectionMode { isotropic, axis };

std::string to_string(Family f);
std::string to_string(DirectionMode m);
Family family_from_string(const std::string& s);
DirectionMode direction_from_string(const std::string& s);

struct LadderRung {
  int k = 0;
  double level = 0.0;     // t_k = exp(exp(k)); +inf once unrepresentable
  double weight = 0.0;    // t_k^2 p_k
  double log_prob = 0.0;  // log p_k
};

class DistributionSpec {
 public:
  static DistributionSpec gaussian_iso(int d);
  static DistributionSpec rademacher_product(int d);
  /// Uniform on [-sqrt 3, sqrt 3]^d; d <= 3.
  static DistributionSpec uniform_cube(int d);
  /// Requires c >= 0, k0 >= 1 and c / k0 < d.
  static DistributionSpec atom_ladder(int d, double c, int k0 = 2,
                                      DirectionMode mode = DirectionMode::isotropic);
  /// Requires k0 >= 1 and 1 / sqrt(k0) < d.
  static DistributionSpec atom_ladder_fat(int d, int k0 = 2,
                                          DirectionMode mode = DirectionMode::isotropic);

  Family family() const { return family_; }
  int dim() const { return d_; }
  double c() const { return c_; }
  int k0() const { return k0_; }
  DirectionMode direction() const { return direction_; }
  bool is_ladder() const { return family_ == Family::atom_ladder || family_ == Family::atom_ladder_fat; }

  /// Stable identifier, e.g. "atom_ladder(c=0.5,k0=2,isotropic)".
  std::string id() const;

  /// E[|X|^2 1{|X| <= t}].
  double second_moment_within(double t) const;
  /// tau(t) = E[|X|^2 1{|X| >= t}].
  double tail_second_moment(double t) const;

  /// Ladder rungs k0..6 (those with a finite double level).
  const std::vector<LadderRung>& rungs() const { return rungs_; }
  /// Analytic ladder mass sum_{j >= k} t_j^2 p_j.
  double ladder_tail_from(int k) const;
  /// Rungs with p_k >= 1e-300; only these are ever sampled.
  int sampled_rung_count() const { return sampled_rungs_; }
  double base_halfwidth() const { return base_u_; }
  double base_prob() const { return base_w_; }

 private:
  DistributionSpec(Family f, int d) : family_(f), d_(d) {}
  void build_ladder();
  int first_rung_at_or_above(double t) const;
  int last_rung_at_or_below(double t) const;

  Family family_;
  int d_;
  double c_ = 0.0;
  int k0_ = 0;
  DirectionMode direction_ = DirectionMode::isotropic;
  std::vector<LadderRung> rungs_;
  int sampled_rungs_ = 0;
  double base_u_ = 0.0;
  double base_w_ = 1.0;
};

/// Draws i.i.d. increments for one replication. Holds the per-stream state
/// of the normal sampler, so use one Sampler per stream.
class Sampler {
 public:
  explicit Sampler(const DistributionSpec& spec);
  void draw(Stream& s, Vec& out);
  Vec operator()(Stream& s) {
    Vec v(spec_.dim());
    draw(s, v);
    return v;
  }

 private:
  double draw_radius(Stream& s, bool& signed_base);
  void draw_direction(Stream& s, Vec& out);

  DistributionSpec spec_;
  NormalSampler normal_;
  std::vector<double> rung_cdf_;  // cumulative rung probabilities
  double ladder_prob_ = 0.0;
};

Vec sample(const DistributionSpec& spec, Stream& s);

/// A(t)^2 = E[X X^T 1{|X| <= t}]; A(0)^2 = 0 and A(inf)^2 = I.
Psd truncated_second_moment(const DistributionSpec& spec, double t);

struct TailProfile {
  double t = 0.0;
  double tau = 0.0;
  double tau_times_LLt = 0.0;
};

/// tau(t) and tau(t) * LL(t) on an ascending grid.
std::vector<TailProfile> tail_profile(const DistributionSpec& spec, std::span<const double> t_grid);

}  // namespace delab
