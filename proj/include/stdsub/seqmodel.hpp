#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stdsub/tower.hpp"

namespace stdsub {

inline constexpr double k_half_pi = 1.5707963267948966;

// Angle tail rules. Power kinds require alpha > 0 so a constant sequence is
// always spelled Constant and the classifier can trust the kind tag.
enum class AngleRuleKind { Constant, PowerLaw, PowerLawToHalfPi };

struct SimpleAngleRule {
  AngleRuleKind kind = AngleRuleKind::Constant;
  double c = 1.0;      // Constant: the angle itself; power laws: prefactor
  double alpha = 1.0;  // decay exponent of the power laws

  double theta(long n) const {
    switch (kind) {
      case AngleRuleKind::Constant:
        return c;
      case AngleRuleKind::PowerLaw:
        return c * std::pow(static_cast<double>(n), -alpha);
      case AngleRuleKind::PowerLawToHalfPi:
        return k_half_pi - c * std::pow(static_cast<double>(n), -alpha);
    }
    return c;
  }
  bool operator==(const SimpleAngleRule& o) const {
    return kind == o.kind && c == o.c && alpha == o.alpha;
  }
};

inline void validate_rule(const SimpleAngleRule& r) {
  switch (r.kind) {
    case AngleRuleKind::Constant:
      if (!(r.c > 0.0 && r.c <= k_half_pi + 1e-12))
        throw Error("BadAngle", "constant angle must lie in (0, pi/2]");
      return;
    case AngleRuleKind::PowerLaw:
      if (!(r.c > 0.0 && r.c <= k_half_pi + 1e-12))
        throw Error("BadAngle", "power law prefactor must lie in (0, pi/2]");
      if (!(r.alpha > 0.0))
        throw Error("BadAngle", "power law needs a positive decay exponent");
      return;
    case AngleRuleKind::PowerLawToHalfPi:
      if (!(r.c > 0.0 && r.c < k_half_pi))
        throw Error("BadAngle",
                    "approach to pi/2 needs a prefactor in (0, pi/2)");
      if (!(r.alpha > 0.0))
        throw Error("BadAngle", "power law needs a positive decay exponent");
      return;
  }
}

// Angle sequence: finite table of explicit leading angles, then per-parity
// tail rules (equal rules give the uniform case). 1-based index.
struct AngleSequence {
  std::vector<double> prefix;
  SimpleAngleRule odd_rule;   // n odd
  SimpleAngleRule even_rule;  // n even

  double theta(long n) const {
    if (n < 1) throw Error("IndexOutOfRange", "angle index starts at 1");
    if (n <= static_cast<long>(prefix.size())) return prefix[n - 1];
    return (n % 2 == 1 ? odd_rule : even_rule).theta(n);
  }
  bool uniform() const { return odd_rule == even_rule; }
};

inline AngleSequence constant_angles(double theta) {
  SimpleAngleRule r{AngleRuleKind::Constant, theta, 0.0};
  validate_rule(r);
  return {{}, r, r};
}

inline AngleSequence power_law_angles(double c, double alpha) {
  SimpleAngleRule r{AngleRuleKind::PowerLaw, c, alpha};
  validate_rule(r);
  return {{}, r, r};
}

inline AngleSequence power_law_to_half_pi_angles(double c, double alpha) {
  SimpleAngleRule r{AngleRuleKind::PowerLawToHalfPi, c, alpha};
  validate_rule(r);
  return {{}, r, r};
}

inline AngleSequence alternate_angles(const SimpleAngleRule& odd,
                                      const SimpleAngleRule& even) {
  validate_rule(odd);
  validate_rule(even);
  return {{}, odd, even};
}

inline AngleSequence with_prefix(AngleSequence a,
                                 const std::vector<double>& prefix) {
  for (double th : prefix)
    if (!(th > 0.0 && th <= k_half_pi + 1e-12))
      throw Error("BadAngle", "prefix angle must lie in (0, pi/2]");
  a.prefix = prefix;
  return a;
}

// Coefficient sequence c_n = c * n^{-beta} on the support parity, zero off
// it, multiplying one per-fiber spectral branch vector.
enum class Support { All, Even, Odd };

inline const char* support_name(Support s) {
  switch (s) {
    case Support::All: return "all";
    case Support::Even: return "even";
    case Support::Odd: return "odd";
  }
  return "all";
}

struct CoefficientSequence {
  Support support = Support::All;
  double c = 1.0;
  double beta = 1.0;
  Branch branch = Branch::DeltaLarge;

  double coeff(long n) const {
    if (n < 1) throw Error("IndexOutOfRange", "coefficient index starts at 1");
    if (support == Support::Even && n % 2 == 1) return 0.0;
    if (support == Support::Odd && n % 2 == 0) return 0.0;
    return c * std::pow(static_cast<double>(n), -beta);
  }
};

inline const char* branch_name(Branch b) {
  switch (b) {
    case Branch::DeltaLarge: return "delta_large";
    case Branch::DeltaSmall: return "delta_small";
    case Branch::DLarge: return "d_large";
    case Branch::DSmall: return "d_small";
  }
  return "delta_large";
}

// Exact per-fiber weight carried by a spectral branch at angle theta.
inline double branch_weight_value(Branch b, double theta) {
  double t = std::tan(theta / 2.0);
  double s = std::sin(theta);
  switch (b) {
    case Branch::DeltaLarge: return 1.0 / (t * t);
    case Branch::DeltaSmall: return t * t;
    case Branch::DLarge: return (1.0 + s) / (1.0 - s);
    case Branch::DSmall: return (1.0 - s) / (1.0 + s);
  }
  return 1.0;
}

// Weight rules for the domain sums: constant one, an explicit power growth,
// or the branch weight evaluated along an angle sequence.
struct WeightRule {
  enum class Kind { One, PowerGrowth, AngleBranch };
  Kind kind = Kind::One;
  double prefactor = 1.0;  // PowerGrowth: w_n = prefactor * n^exponent
  double exponent = 0.0;
  AngleSequence angles;  // AngleBranch only
  Branch branch = Branch::DeltaLarge;

  static WeightRule one() { return {}; }
  static WeightRule power(double prefactor, double exponent) {
    WeightRule w;
    w.kind = Kind::PowerGrowth;
    w.prefactor = prefactor;
    w.exponent = exponent;
    return w;
  }
  static WeightRule angle_branch(const AngleSequence& a, Branch b) {
    WeightRule w;
    w.kind = Kind::AngleBranch;
    w.angles = a;
    w.branch = b;
    return w;
  }

  double value(long n) const {
    switch (kind) {
      case Kind::One:
        return 1.0;
      case Kind::PowerGrowth:
        return prefactor * std::pow(static_cast<double>(n), exponent);
      case Kind::AngleBranch:
        return branch_weight_value(branch, angles.theta(n));
    }
    return 1.0;
  }
};

enum class SumVerdict { Converges, Diverges, Inconclusive };

inline const char* verdict_name(SumVerdict v) {
  switch (v) {
    case SumVerdict::Converges: return "converges";
    case SumVerdict::Diverges: return "diverges";
    case SumVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct SumCertificate {
  SumVerdict verdict = SumVerdict::Inconclusive;
  double term_exponent = 0.0;  // q in term ~ prefactor * n^{-q}
  double prefactor = 0.0;
  std::string reason;
};

namespace detail {

// w_n ~ prefactor * n^exponent along one tail rule.
struct Asymptotic {
  double exponent = 0.0;
  double prefactor = 1.0;
};

inline Asymptotic branch_weight_asymptotic(const SimpleAngleRule& r,
                                           Branch b) {
  switch (r.kind) {
    case AngleRuleKind::Constant:
      return {0.0, branch_weight_value(b, r.c)};
    case AngleRuleKind::PowerLaw:
      // theta -> 0: tan(theta/2) ~ theta/2, so the large delta branch grows
      // like (2/theta)^2 and the D-branch weights tend to one.
      if (b == Branch::DeltaLarge) return {2.0 * r.alpha, 4.0 / (r.c * r.c)};
      if (b == Branch::DeltaSmall) return {-2.0 * r.alpha, r.c * r.c / 4.0};
      return {0.0, 1.0};
    case AngleRuleKind::PowerLawToHalfPi:
      // theta -> pi/2: 1 - sin(theta) ~ (pi/2 - theta)^2 / 2, so the large
      // D branch grows like 4/(pi/2-theta)^2; delta weights tend to one.
      if (b == Branch::DLarge) return {2.0 * r.alpha, 4.0 / (r.c * r.c)};
      if (b == Branch::DSmall) return {-2.0 * r.alpha, r.c * r.c / 4.0};
      return {0.0, 1.0};
  }
  return {0.0, 1.0};
}

inline Asymptotic weight_asymptotic(const WeightRule& w,
                                    const SimpleAngleRule& parity_rule) {
  switch (w.kind) {
    case WeightRule::Kind::One:
      return {0.0, 1.0};
    case WeightRule::Kind::PowerGrowth:
      return {w.exponent, w.prefactor};
    case WeightRule::Kind::AngleBranch:
      return branch_weight_asymptotic(parity_rule, w.branch);
  }
  return {0.0, 1.0};
}

}  // namespace detail

// Symbolic p-series decision for sum_n w_n |c_n|^2 over the support of c.
// Terms are power laws by construction, so the verdict is exact: the series
// converges iff the term exponent exceeds one (the boundary diverges).
// Finitely many prefix overrides never change the verdict.
inline SumCertificate weighted_sum_test(const CoefficientSequence& c,
                                        const WeightRule& w) {
  struct Piece {
    const char* parity;
    detail::Asymptotic asym;
  };
  std::vector<Piece> pieces;
  const AngleSequence* a =
      w.kind == WeightRule::Kind::AngleBranch ? &w.angles : nullptr;
  if (c.support == Support::All && a != nullptr && !a->uniform()) {
    pieces.push_back({"odd", detail::weight_asymptotic(w, a->odd_rule)});
    pieces.push_back({"even", detail::weight_asymptotic(w, a->even_rule)});
  } else {
    SimpleAngleRule rule;
    if (a != nullptr)
      rule = (c.support == Support::Even) ? a->even_rule : a->odd_rule;
    pieces.push_back(
        {support_name(c.support), detail::weight_asymptotic(w, rule)});
  }

  SumCertificate cert;
  bool any_diverges = false;
  double q_min = std::numeric_limits<double>::infinity();
  double pre_at_min = 0.0;
  std::ostringstream reason;
  for (const auto& p : pieces) {
    double q = 2.0 * c.beta - p.asym.exponent;
    double pre = c.c * c.c * p.asym.prefactor;
    bool div = !(q > 1.0);
    if (div) any_diverges = true;
    if (q < q_min) {
      q_min = q;
      pre_at_min = pre;
    }
    reason << "terms on " << p.parity << " indices behave like " << pre
           << " * n^-" << q << ", a p-series that "
           << (div ? "diverges (exponent <= 1)" : "converges (exponent > 1)")
           << "; ";
  }
  reason << "finite prefix overrides cannot change the verdict";
  cert.verdict = any_diverges ? SumVerdict::Diverges : SumVerdict::Converges;
  cert.term_exponent = q_min;
  cert.prefactor = pre_at_min;
  cert.reason = reason.str();
  return cert;
}

// Numeric cross-check: the literal partial sum to n_max.
inline double partial_sum(const CoefficientSequence& c, const WeightRule& w,
                          long n_max) {
  double s = 0.0;
  for (long n = 1; n <= n_max; ++n) {
    double cn = c.coeff(n);
    if (cn == 0.0) continue;
    s += w.value(n) * cn * cn;
  }
  return s;
}

// Extension construction: pick coefficient sequences whose generator stays
// in the space (square-summable) while escaping the required operator
// domain (weighted sum diverges). The decay rule beta = (min(2a,1)+1)/2
// guarantees both properties for any angle decay exponent a > 0.
enum class ExtensionGoal { Standard, Irreducible, Both };

inline const char* goal_name(ExtensionGoal g) {
  switch (g) {
    case ExtensionGoal::Standard: return "standard";
    case ExtensionGoal::Irreducible: return "irreducible";
    case ExtensionGoal::Both: return "both";
  }
  return "standard";
}

struct ExtensionPlan {
  ExtensionGoal goal = ExtensionGoal::Standard;
  std::vector<CoefficientSequence> parts;  // their sum is the one generator
  std::vector<SumCertificate> certificates;  // per part: [in-space, escape]
  std::string note;
};

namespace detail {

inline std::string rule_trend(const SimpleAngleRule& r) {
  std::ostringstream os;
  switch (r.kind) {
    case AngleRuleKind::Constant:
      os << "angles constant at " << r.c
         << "; per-fiber delta eigenvalues stay at the fixed pair {"
         << std::tan(r.c / 2.0) * std::tan(r.c / 2.0) << ", "
         << 1.0 / (std::tan(r.c / 2.0) * std::tan(r.c / 2.0))
         << "}, bounded away from the needed accumulation point";
      break;
    case AngleRuleKind::PowerLaw:
      os << "angles decay to zero like " << r.c << " * n^-" << r.alpha
         << "; small delta eigenvalues accumulate at zero";
      break;
    case AngleRuleKind::PowerLawToHalfPi:
      os << "angles rise to pi/2 like pi/2 - " << r.c << " * n^-" << r.alpha
         << "; delta spectrum accumulates at one";
      break;
  }
  return os.str();
}

inline double extension_beta(double alpha) {
  return (std::min(2.0 * alpha, 1.0) + 1.0) / 2.0;
}

inline CoefficientSequence extension_part(Support sup,
                                          const SimpleAngleRule& rule,
                                          Branch branch) {
  return {sup, 1.0, extension_beta(rule.alpha), branch};
}

}  // namespace detail

inline ExtensionPlan construct_extension(const AngleSequence& a,
                                         ExtensionGoal goal) {
  auto feasible = [&](AngleRuleKind want, Support* sup_out,
                      const SimpleAngleRule** rule_out) {
    if (a.uniform()) {
      if (a.odd_rule.kind == want) {
        *sup_out = Support::All;
        *rule_out = &a.odd_rule;
        return true;
      }
      return false;
    }
    if (a.odd_rule.kind == want) {
      *sup_out = Support::Odd;
      *rule_out = &a.odd_rule;
      return true;
    }
    if (a.even_rule.kind == want) {
      *sup_out = Support::Even;
      *rule_out = &a.even_rule;
      return true;
    }
    return false;
  };
  auto trend_report = [&](const char* need) {
    std::ostringstream os;
    os << "goal needs " << need << ": ";
    if (a.uniform()) {
      os << detail::rule_trend(a.odd_rule);
    } else {
      os << "odd fibers: " << detail::rule_trend(a.odd_rule)
         << "; even fibers: " << detail::rule_trend(a.even_rule);
    }
    return os.str();
  };

  ExtensionPlan plan;
  plan.goal = goal;
  auto add_part = [&](Support sup, const SimpleAngleRule& rule,
                      Branch branch) {
    CoefficientSequence part = detail::extension_part(sup, rule, branch);
    plan.parts.push_back(part);
    plan.certificates.push_back(weighted_sum_test(part, WeightRule::one()));
    plan.certificates.push_back(
        weighted_sum_test(part, WeightRule::angle_branch(a, branch)));
  };

  Support sup;
  const SimpleAngleRule* rule = nullptr;
  switch (goal) {
    case ExtensionGoal::Standard:
      if (!feasible(AngleRuleKind::PowerLaw, &sup, &rule))
        throw Error("GoalInfeasible",
                    trend_report("small delta eigenvalues accumulating at "
                                 "zero (angles -> 0)"));
      add_part(sup, *rule, Branch::DeltaLarge);
      plan.note =
          "generator escapes the domain of the positive modular factor while "
          "staying square-summable, so adding its real line preserves "
          "standardness in the limit model";
      return plan;
    case ExtensionGoal::Irreducible:
      if (!feasible(AngleRuleKind::PowerLawToHalfPi, &sup, &rule))
        throw Error("GoalInfeasible",
                    trend_report("delta spectrum accumulating at one "
                                 "(angles -> pi/2)"));
      add_part(sup, *rule, Branch::DLarge);
      plan.note =
          "generator escapes the domain of the pair operator while staying "
          "square-summable, so the relative commutant of the extended "
          "inclusion collapses in the limit model";
      return plan;
    case ExtensionGoal::Both: {
      Support sup_std, sup_irr;
      const SimpleAngleRule* rule_std = nullptr;
      const SimpleAngleRule* rule_irr = nullptr;
      bool ok_std = feasible(AngleRuleKind::PowerLaw, &sup_std, &rule_std);
      bool ok_irr =
          feasible(AngleRuleKind::PowerLawToHalfPi, &sup_irr, &rule_irr);
      if (!ok_std || !ok_irr || sup_std == sup_irr)
        throw Error("GoalInfeasible",
                    trend_report("both accumulation points, one per parity "
                                 "(angles -> 0 on one parity and -> pi/2 on "
                                 "the other)"));
      add_part(sup_std, *rule_std, Branch::DeltaLarge);
      add_part(sup_irr, *rule_irr, Branch::DLarge);
      plan.note =
          "combined generator is the sum of the two branch-supported parts: "
          "fibers with angles near zero carry the large delta branch, fibers "
          "with angles near pi/2 carry the large pair-operator branch; the "
          "support split realizes the angle-operator spectral windows below "
          "and above pi/4 up to finitely many leading fibers";
      return plan;
    }
  }
  throw Error("GoalInfeasible", "unknown goal");
}

// Symbolic model: angle descriptor plus the extension generators it carries.
struct AngleSequenceModel {
  AngleSequence angles;
  std::vector<CoefficientSequence> extensions;
  int n_materialize = 64;
};

// Concrete truncation: the first `fibers` angle fibers as one real subspace
// of C^{2 fibers}, with the extension generator summed across parts and
// fibers. No extensions means M1 = M0.
struct MaterializedModel {
  int fibers = 0;
  RealSubspace m0;
  RealSubspace m1;
  Vec extension;  // zero when the model carries no extension vectors
  std::vector<double> angles;
};

inline MaterializedModel materialize(const AngleSequenceModel& m,
                                     int fibers) {
  if (fibers < 1)
    throw Error("CapExceeded", "materialize: need at least one fiber");
  if (fibers > m.n_materialize)
    throw Error("CapExceeded",
                "materialize: fiber count " + std::to_string(fibers) +
                    " exceeds the model cap " +
                    std::to_string(m.n_materialize));
  MaterializedModel out;
  out.fibers = fibers;
  const int d = 2 * fibers;
  Mat frame = Mat::Zero(2 * d, 2 * fibers);
  Vec v = Vec::Zero(2 * d);
  for (int n = 1; n <= fibers; ++n) {
    double th = m.angles.theta(n);
    out.angles.push_back(th);
    RealSubspace fiber = fiber_subspace(th);
    frame.block(4 * (n - 1), 2 * (n - 1), 4, 2) = fiber.frame;
    for (const auto& part : m.extensions) {
      double cn = part.coeff(n);
      if (cn != 0.0)
        v.segment(4 * (n - 1), 4) += cn * fiber_branch_vector(part.branch);
    }
  }
  out.m0 = RealSubspace{d, frame};
  out.extension = v;
  if (v.norm() == 0.0) {
    out.m1 = out.m0;
  } else {
    Mat gen = v / v.norm();
    out.m1 = join(out.m0, RealSubspace{d, gen});
  }
  return out;
}

// Bridge to the tower module: no extension gives the exact constant tower,
// a genuine extension gives the truncated regime with defect accounting.
inline TowerState truncated_tower(const AngleSequenceModel& m, int fibers,
                                  int k_min, int k_max,
                                  const Tolerances& tol = {}) {
  MaterializedModel mat = materialize(m, fibers);
  if (mat.m1.dim() == mat.m0.dim())
    return extend_tower(mat.m0, mat.m1, k_min, k_max, tol);
  return truncated_extend(mat.m0, mat.m1, k_min, k_max, tol);
}

// Tensor-model type classification. The constant-angle claim is the whole
// scope: lambda = tan^2(theta/2), with the ratio pair {lambda, 1/lambda}
// generating the scaling invariant. Everything else is declared out of
// scope and ships the raw fiber ratios instead of a guess.
struct TypeLabel {
  std::string label;  // III_lambda | delta_identity | unknown_out_of_scope
  double lambda = 0.0;
  std::vector<double> ratio_sequence;
  std::string note;
};

inline TypeLabel itpfi_classify(const AngleSequenceModel& m) {
  const AngleSequence& a = m.angles;
  bool constant = a.uniform() && a.odd_rule.kind == AngleRuleKind::Constant;
  if (constant)
    for (double th : a.prefix)
      if (std::abs(th - a.odd_rule.c) > 1e-12) constant = false;
  TypeLabel out;
  if (!constant) {
    out.label = "unknown_out_of_scope";
    out.lambda = 0.0;
    for (long n = 1; n <= 16; ++n) {
      double t = std::tan(a.theta(n) / 2.0);
      out.ratio_sequence.push_back(t * t);
    }
    out.note =
        "classification is established for constant angle sequences only; "
        "raw per-fiber eigenvalue ratios attached, no extrapolation";
    return out;
  }
  double theta = a.odd_rule.c;
  double t = std::tan(theta / 2.0);
  double lambda = t * t;
  if (std::abs(theta - k_half_pi) <= 1e-12) {
    out.label = "delta_identity";
    out.lambda = 1.0;
    out.ratio_sequence = {1.0, 1.0};
    out.note =
        "angle pi/2 makes every fiber modular operator the identity; the "
        "scaling invariant degenerates to the boundary value one";
    return out;
  }
  out.label = "III_lambda";
  out.lambda = lambda;
  out.ratio_sequence = {lambda, 1.0 / lambda};
  out.note =
      "constant angle sequence; the modular scaling invariant is the "
      "multiplicative group generated by lambda (pair {lambda, 1/lambda} "
      "reported)";
  return out;
}

}  // namespace stdsub
