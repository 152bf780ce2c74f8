#include "core/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "core/rng.hpp"

namespace nc {

SetFunction::SetFunction(unsigned num_users, std::vector<double> values)
    : num_users_(num_users), values_(std::move(values)) {
  if (num_users_ == 0 || num_users_ > 20) {
    throw std::invalid_argument("SetFunction: number of users must be in [1, 20]");
  }
  if (values_.size() != (std::size_t{1} << num_users_)) {
    throw std::invalid_argument("SetFunction: need one value per subset");
  }
}

PolymatroidCheck verify_polymatroid(const SetFunction& f, double tol) {
  if (f.num_users() > 10) {
    throw std::invalid_argument("verify_polymatroid: at most 10 users");
  }
  PolymatroidCheck out;
  if (std::abs(f(0)) > tol) {
    out.ok = false;
    out.violated = "normalized";
    out.excess = std::abs(f(0));
    return out;
  }
  const SubsetMask n = f.full() + 1;
  for (SubsetMask t = 1; t < n; ++t) {
    // Monotonicity only needs single-element removals.
    for (unsigned l = 0; l < f.num_users(); ++l) {
      const SubsetMask bit = SubsetMask{1} << l;
      if ((t & bit) && f(t & ~bit) > f(t) + tol) {
        out.ok = false;
        out.violated = "monotone";
        out.u = t & ~bit;
        out.v = t;
        out.excess = f(t & ~bit) - f(t);
        return out;
      }
    }
  }
  for (SubsetMask u = 0; u < n; ++u) {
    for (SubsetMask v = u + 1; v < n; ++v) {
      const double lhs = f(u | v) + f(u & v);
      const double rhs = f(u) + f(v);
      if (lhs > rhs + tol) {
        out.ok = false;
        out.violated = "submodular";
        out.u = u;
        out.v = v;
        out.excess = lhs - rhs;
        return out;
      }
    }
  }
  return out;
}

std::vector<double> corner_point(const SetFunction& f, std::span<const std::size_t> perm) {
  const unsigned l_count = f.num_users();
  if (perm.size() != l_count) {
    throw std::invalid_argument("corner_point: permutation length must equal L");
  }
  std::vector<bool> seen(l_count, false);
  for (std::size_t u : perm) {
    if (u >= l_count || seen[u]) {
      throw std::invalid_argument("corner_point: not a permutation");
    }
    seen[u] = true;
  }
  if (!verify_polymatroid(f).ok) {
    throw std::invalid_argument("corner_point: set function is not a polymatroid");
  }
  std::vector<double> rates(l_count, 0.0);
  SubsetMask tail = 0;
  for (std::size_t k = l_count; k-- > 0;) {
    const SubsetMask with = tail | (SubsetMask{1} << perm[k]);
    rates[perm[k]] = f(with) - f(tail);
    tail = with;
  }
  return rates;
}

InputDistribution::InputDistribution(std::vector<std::size_t> sizes, Pmf joint)
    : alphabet_(std::move(sizes)), joint_(std::move(joint)) {
  if (joint_.size() != alphabet_.size()) {
    throw std::invalid_argument("InputDistribution: law size does not match alphabet");
  }
}

InputDistribution InputDistribution::product(std::span<const Pmf> factors) {
  if (factors.empty()) {
    throw std::invalid_argument("InputDistribution::product: need at least one factor");
  }
  std::vector<std::size_t> sizes;
  for (const Pmf& f : factors) {
    sizes.push_back(f.size());
  }
  ProductAlphabet alpha(sizes);
  std::vector<double> joint(alpha.size());
  for (std::size_t x = 0; x < alpha.size(); ++x) {
    double v = 1.0;
    for (std::size_t l = 0; l < factors.size(); ++l) {
      v *= factors[l][alpha.component(x, l)];
    }
    joint[x] = v;
  }
  InputDistribution d(sizes, Pmf(std::move(joint)));
  d.constraint_ = InputConstraint::Product;
  d.factors_.assign(factors.begin(), factors.end());
  return d;
}

InputDistribution InputDistribution::uniform(std::vector<std::size_t> sizes,
                                             InputConstraint constraint) {
  if (constraint == InputConstraint::Product) {
    std::vector<Pmf> factors;
    for (std::size_t s : sizes) {
      factors.push_back(Pmf::uniform(s));
    }
    return product(factors);
  }
  ProductAlphabet alpha(sizes);
  return InputDistribution(std::move(sizes), Pmf::uniform(alpha.size()));
}

const std::vector<Pmf>& InputDistribution::factors() const {
  if (constraint_ != InputConstraint::Product) {
    throw std::logic_error("InputDistribution::factors: not a product distribution");
  }
  return factors_;
}

Pmf InputDistribution::user_marginal(std::size_t user) const {
  if (user >= alphabet_.arity()) {
    throw std::out_of_range("InputDistribution::user_marginal: user out of range");
  }
  std::vector<double> m(alphabet_.size_of(user), 0.0);
  for (std::size_t x = 0; x < alphabet_.size(); ++x) {
    m[alphabet_.component(x, user)] += joint_[x];
  }
  return Pmf(std::move(m));
}

namespace {

struct SubsetIndexer {
  std::vector<std::size_t> users;
  std::size_t size = 1;

  SubsetIndexer(const ProductAlphabet& alpha, SubsetMask t) {
    for (std::size_t l = 0; l < alpha.arity(); ++l) {
      if (t & (SubsetMask{1} << l)) {
        users.push_back(l);
        size *= alpha.size_of(l);
      }
    }
  }

  std::size_t index(const ProductAlphabet& alpha, std::size_t x) const {
    std::size_t i = 0;
    for (std::size_t l : users) {
      i = i * alpha.size_of(l) + alpha.component(x, l);
    }
    return i;
  }
};

} // namespace

JointPmf subset_joint(const MacChannel& m, const Pmf& joint_input, SubsetMask t) {
  const ProductAlphabet& alpha = m.inputs();
  if (joint_input.size() != alpha.size()) {
    throw std::invalid_argument("subset_joint: input law does not match the MAC");
  }
  if (t == 0 || t >= (SubsetMask{1} << alpha.arity())) {
    throw std::invalid_argument("subset_joint: subset must be nonempty and within L");
  }
  const SubsetIndexer idx(alpha, t);
  const std::size_t ny = m.output_size();
  std::vector<double> v(idx.size * ny, 0.0);
  for (std::size_t x = 0; x < alpha.size(); ++x) {
    const double px = joint_input[x];
    if (px == 0.0) {
      continue;
    }
    const std::size_t row = idx.index(alpha, x);
    for (std::size_t y = 0; y < ny; ++y) {
      v[row * ny + y] += px * m.flat()(x, y);
    }
  }
  // Rounding can leave the total a few ulps off 1; renormalization in the
  // constructor absorbs it.
  return JointPmf(idx.size, ny, std::move(v));
}

SetFunction entropy_set_function(const MacChannel& m, const InputDistribution& p) {
  if (p.alphabet().sizes() != m.inputs().sizes()) {
    throw std::invalid_argument("entropy_set_function: distribution does not match the MAC");
  }
  const unsigned l_count = static_cast<unsigned>(m.num_users());
  std::vector<double> values(std::size_t{1} << l_count, 0.0);
  for (SubsetMask t = 1; t < values.size(); ++t) {
    values[t] = conditional_entropy(subset_joint(m, p.joint(), t));
  }
  return SetFunction(l_count, std::move(values));
}

RateRegionSpec rate_region(const MacChannel& m, const InputDistribution& p) {
  return RateRegionSpec{entropy_set_function(m, p), p};
}

bool in_region(std::span<const double> rates, const RateRegionSpec& spec, double tol) {
  if (rates.size() != spec.f.num_users()) {
    throw std::invalid_argument("in_region: rate tuple length must equal L");
  }
  for (SubsetMask t = 1; t <= spec.f.full(); ++t) {
    double r = 0.0;
    for (std::size_t l = 0; l < rates.size(); ++l) {
      if (t & (SubsetMask{1} << l)) {
        r += rates[l];
      }
    }
    if (r > spec.f(t) + tol) {
      return false;
    }
  }
  return true;
}

double conditional_entropy_through(const Dmc& w, const Pmf& p) {
  return conditional_entropy(JointPmf::from_conditional(p, w.output_size(), w.rows()));
}

namespace {

using Vec = std::vector<double>;
using Objective = std::function<double(const Vec&)>;
using Gradient = std::function<Vec(const Vec&)>;

constexpr double kStopImprovement = 1e-10;
constexpr double kTieResolution = 1e-9;
constexpr double kGradientFloor = 1e-15;

// Euclidean projection onto the probability simplex.
Vec project_simplex(const Vec& v) {
  Vec u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      theta = t;
    }
  }
  Vec out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - theta, 0.0);
    total += out[i];
  }
  for (double& x : out) {
    x /= total;
  }
  return out;
}

// Projected gradient ascent with step halving on rejection and step
// doubling after acceptance.
Vec ascend(const Objective& f, const Gradient& grad, Vec p, std::size_t max_iters = 20000) {
  double fp = f(p);
  double step = 1.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const Vec g = grad(p);
    bool moved = false;
    Vec q;
    double fq = fp;
    while (step > 1e-14) {
      Vec trial(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        trial[i] = p[i] + step * g[i];
      }
      q = project_simplex(trial);
      fq = f(q);
      if (fq > fp) {
        moved = true;
        break;
      }
      step /= 2.0;
    }
    if (!moved) {
      break;
    }
    const double gain = fq - fp;
    p = std::move(q);
    fp = fq;
    step = std::min(step * 2.0, 64.0);
    if (gain < kStopImprovement) {
      break;
    }
  }
  return p;
}

// H(X|Y) and its gradient -log p(x) - D(W_x || W o p), both in bits.
double h_x_given_y(const Dmc& w, const Vec& p) {
  const std::size_t ny = w.output_size();
  Vec r(ny, 0.0);
  double h = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] <= 0.0) {
      continue;
    }
    h -= p[x] * std::log2(p[x]);
    for (std::size_t y = 0; y < ny; ++y) {
      const double wy = w(x, y);
      r[y] += p[x] * wy;
      if (wy > 0.0) {
        h -= p[x] * wy * std::log2(wy);
      }
    }
  }
  for (double ry : r) {
    if (ry > 0.0) {
      h += ry * std::log2(ry);
    }
  }
  return h;
}

Vec h_x_given_y_gradient(const Dmc& w, const Vec& p) {
  const std::size_t ny = w.output_size();
  Vec r(ny, 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      r[y] += p[x] * w(x, y);
    }
  }
  Vec g(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) {
    double d = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      const double wy = w(x, y);
      if (wy > 0.0) {
        d += wy * std::log2(wy / std::max(r[y], kGradientFloor));
      }
    }
    g[x] = -std::log2(std::max(p[x], kGradientFloor)) - d;
  }
  return g;
}

Vec random_simplex_point(std::size_t size, Rng& rng) {
  Vec v(size);
  double total = 0.0;
  for (double& x : v) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  for (double& x : v) {
    x /= total;
  }
  return v;
}

// Lexicographic comparison at kTieResolution.
bool lex_smaller(const Vec& a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double qa = std::round(a[i] / kTieResolution);
    const double qb = std::round(b[i] / kTieResolution);
    if (qa != qb) {
      return qa < qb;
    }
  }
  return false;
}

struct Best {
  double value = -1.0;
  Vec point;

  void offer(double v, const Vec& p) {
    const bool better = point.empty() || v > value + kTieResolution;
    const bool tie = !point.empty() && std::abs(v - value) <= kTieResolution && lex_smaller(p, point);
    if (better || tie) {
      value = v;
      point = p;
    }
  }
};

// Simplex grid with the given number of steps per unit, visited in place.
void for_each_grid_point(std::size_t size, unsigned steps, const std::function<void(const Vec&)>& body) {
  std::vector<unsigned> counts(size, 0);
  Vec p(size);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
    if (i + 1 == size) {
      counts[i] = left;
      for (std::size_t k = 0; k < size; ++k) {
        p[k] = static_cast<double>(counts[k]) / static_cast<double>(steps);
      }
      body(p);
      return;
    }
    for (unsigned c = 0; c <= left; ++c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, steps);
}

std::size_t grid_size(std::size_t size, unsigned steps) {
  // C(steps + size - 1, size - 1), saturating.
  double c = 1.0;
  for (std::size_t k = 1; k < size; ++k) {
    c = c * static_cast<double>(steps + k) / static_cast<double>(k);
  }
  return c > 1e12 ? static_cast<std::size_t>(1e12) : static_cast<std::size_t>(c);
}

constexpr unsigned kJointRestarts = 20;
constexpr unsigned kProductRestarts = 50;
constexpr unsigned kProductGridSteps = 100;
constexpr std::size_t kProductGridLimit = 250000;

Vec product_joint(const ProductAlphabet& alpha, const std::vector<Vec>& factors) {
  Vec joint(alpha.size());
  for (std::size_t x = 0; x < alpha.size(); ++x) {
    double v = 1.0;
    for (std::size_t l = 0; l < factors.size(); ++l) {
      v *= factors[l][alpha.component(x, l)];
    }
    joint[x] = v;
  }
  return joint;
}

Vec concat(const std::vector<Vec>& factors) {
  Vec out;
  for (const Vec& f : factors) {
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

// Alternating maximization: each round ascends one factor with the others
// held fixed.
std::vector<Vec> alternate(const MacChannel& m, std::vector<Vec> factors) {
  const ProductAlphabet& alpha = m.inputs();
  const Dmc& w = m.flat();
  double current = h_x_given_y(w, product_joint(alpha, factors));
  for (int round = 0; round < 2000; ++round) {
    for (std::size_t l = 0; l < factors.size(); ++l) {
      auto with = [&](const Vec& q) {
        std::vector<Vec> fs = factors;
        fs[l] = q;
        return fs;
      };
      const Objective f = [&](const Vec& q) { return h_x_given_y(w, product_joint(alpha, with(q))); };
      const Gradient g = [&](const Vec& q) {
        const std::vector<Vec> fs = with(q);
        const Vec joint = product_joint(alpha, fs);
        const Vec gj = h_x_given_y_gradient(w, joint);
        Vec out(q.size(), 0.0);
        for (std::size_t x = 0; x < alpha.size(); ++x) {
          double others = 1.0;
          for (std::size_t k = 0; k < fs.size(); ++k) {
            if (k != l) {
              others *= fs[k][alpha.component(x, k)];
            }
          }
          out[alpha.component(x, l)] += others * gj[x];
        }
        return out;
      };
      factors[l] = ascend(f, g, factors[l], 200);
    }
    const double next = h_x_given_y(w, product_joint(alpha, factors));
    const double gain = next - current;
    current = std::max(current, next);
    if (gain < kStopImprovement) {
      break;
    }
  }
  return factors;
}

std::string redundancy_warning(const RedundancyReport& r) {
  if (r.non_redundant) {
    return {};
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "channel is redundant (margin %.3g); non-redundancy hypothesis fails",
                r.margin_eta);
  return buf;
}

} // namespace

CapacityResult sum_rate_capacity(const MacChannel& m, CollusionMode mode, std::uint64_t seed) {
  const ProductAlphabet& alpha = m.inputs();
  const Dmc& w = m.flat();
  const std::string warning = redundancy_warning(mac_non_redundancy(m));

  if (mode == CollusionMode::Colluding) {
    const Objective f = [&](const Vec& p) { return h_x_given_y(w, p); };
    const Gradient g = [&](const Vec& p) { return h_x_given_y_gradient(w, p); };
    Best best;
    for (unsigned k = 0; k < kJointRestarts; ++k) {
      Rng rng = Rng::derive(seed, k, role_id(Role::Coalition));
      Vec start = k == 0 ? Vec(alpha.size(), 1.0 / static_cast<double>(alpha.size()))
                         : random_simplex_point(alpha.size(), rng);
      Vec p = ascend(f, g, std::move(start));
      best.offer(f(p), p);
    }
    InputDistribution arg(alpha.sizes(), Pmf(best.point));
    const double value = conditional_entropy_through(w, arg.joint());
    return CapacityResult{value, std::move(arg), warning};
  }

  std::vector<std::vector<Vec>> starts;
  {
    std::vector<Vec> uniform;
    for (std::size_t s : alpha.sizes()) {
      uniform.emplace_back(s, 1.0 / static_cast<double>(s));
    }
    starts.push_back(std::move(uniform));
  }
  for (unsigned k = 1; k < kProductRestarts; ++k) {
    Rng rng = Rng::derive(seed, k, role_id(Role::Coalition));
    std::vector<Vec> fs;
    for (std::size_t s : alpha.sizes()) {
      fs.push_back(random_simplex_point(s, rng));
    }
    starts.push_back(std::move(fs));
  }
  // Grid cross-check for two users: the best grid point seeds one more run,
  // so the returned value is never below any grid evaluation.
  if (alpha.arity() == 2) {
    const std::size_t g0 = grid_size(alpha.size_of(0), kProductGridSteps);
    const std::size_t g1 = grid_size(alpha.size_of(1), kProductGridSteps);
    if (g0 * g1 <= kProductGridLimit) {
      Best grid;
      for_each_grid_point(alpha.size_of(0), kProductGridSteps, [&](const Vec& a) {
        for_each_grid_point(alpha.size_of(1), kProductGridSteps, [&](const Vec& b) {
          const std::vector<Vec> fs{a, b};
          grid.offer(h_x_given_y(w, product_joint(alpha, fs)), concat(fs));
        });
      });
      std::vector<Vec> fs{Vec(grid.point.begin(), grid.point.begin() + alpha.size_of(0)),
                          Vec(grid.point.begin() + alpha.size_of(0), grid.point.end())};
      starts.push_back(std::move(fs));
    }
  }
  Best best;
  std::vector<Vec> best_factors;
  for (auto& start : starts) {
    std::vector<Vec> fs = alternate(m, std::move(start));
    const double v = h_x_given_y(w, product_joint(alpha, fs));
    const Vec flat = concat(fs);
    const Vec before = best.point;
    best.offer(v, flat);
    if (best.point != before) {
      best_factors = fs;
    }
  }
  std::vector<Pmf> factors;
  for (Vec& f : best_factors) {
    factors.emplace_back(std::move(f));
  }
  InputDistribution arg = InputDistribution::product(factors);
  const double value = conditional_entropy_through(w, arg.joint());
  return CapacityResult{value, std::move(arg), warning};
}

CapacityResult commitment_capacity(const Dmc& w, std::uint64_t seed) {
  return sum_rate_capacity(MacChannel({w.input_size()}, w), CollusionMode::Colluding, seed);
}

CapacityResult broadcast_capacity(const BroadcastChannel& bc, std::uint64_t seed) {
  std::vector<Dmc> parts;
  std::string warning;
  for (std::size_t b = 0; b < bc.num_receivers(); ++b) {
    parts.push_back(marginal(b, bc));
    const RedundancyReport r = non_redundancy_check(parts.back());
    if (!r.non_redundant && warning.empty()) {
      warning = "marginal channel " + std::to_string(b + 1) +
                " is redundant; non-redundancy hypothesis fails";
    }
  }
  const std::size_t nx = bc.input_size();
  const Objective f = [&](const Vec& p) {
    double v = h_x_given_y(parts[0], p);
    for (std::size_t b = 1; b < parts.size(); ++b) {
      v = std::min(v, h_x_given_y(parts[b], p));
    }
    return v;
  };
  // Average of the gradients of the active minima.
  const Gradient g = [&](const Vec& p) {
    const double v = f(p);
    Vec out(nx, 0.0);
    unsigned active = 0;
    for (const Dmc& part : parts) {
      if (h_x_given_y(part, p) <= v + kTieResolution) {
        const Vec gb = h_x_given_y_gradient(part, p);
        for (std::size_t x = 0; x < nx; ++x) {
          out[x] += gb[x];
        }
        ++active;
      }
    }
    for (double& x : out) {
      x /= static_cast<double>(active);
    }
    return out;
  };
  Best best;
  for (unsigned k = 0; k < kJointRestarts; ++k) {
    Rng rng = Rng::derive(seed, k, role_id(Role::Coalition));
    Vec start = k == 0 ? Vec(nx, 1.0 / static_cast<double>(nx)) : random_simplex_point(nx, rng);
    Vec p = ascend(f, g, std::move(start));
    best.offer(f(p), p);
  }
  Pmf arg(best.point);
  double value = conditional_entropy_through(parts[0], arg);
  for (std::size_t b = 1; b < parts.size(); ++b) {
    value = std::min(value, conditional_entropy_through(parts[b], arg));
  }
  return CapacityResult{value, InputDistribution({nx}, std::move(arg)), warning};
}

} // namespace nc
