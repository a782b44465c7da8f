#include "treewalk/spectral.hpp"

#include <cmath>

namespace treewalk {

Dynamics<WalkState> walk_dynamics(const CoinField& coin, const EvolutionLimits& limits) {
  return Dynamics<WalkState>{
      [coin, limits](const WalkState& s) { return apply_U(coin, s, limits); },
      [coin, limits](const WalkState& s) { return apply_U_inv(coin, s, limits); }};
}

Dynamics<WalkState> tilde_free_dynamics(const CoinField& coin,
                                        const EvolutionLimits& limits) {
  return Dynamics<WalkState>{
      [coin, limits](const WalkState& s) { return apply_U_tilde0(coin, s, limits); },
      [coin, limits](const WalkState& s) { return apply_U_tilde0_inv(coin, s, limits); }};
}

Dynamics<TripleState> free_dynamics(const CoinField& coin, const EvolutionLimits& limits) {
  return Dynamics<TripleState>{
      [coin, limits](const TripleState& t) { return apply_U0(coin, t, limits); },
      [coin, limits](const TripleState& t) { return apply_U0_inv(coin, t, limits); }};
}

void SpectralWindow::validate() const {
  if (!(half_width > 0.0) || half_width > M_PI / 2.0) {
    throw ConfigError("window half width must lie in (0, pi/2]");
  }
  if (!std::isfinite(center)) throw ConfigError("window center must be finite");
}

namespace {

double wrap_angle(double theta) {
  // Into (-pi, pi].
  double t = std::remainder(theta, 2.0 * M_PI);
  if (t <= -M_PI) t += 2.0 * M_PI;
  return t;
}

double smooth_step_down(double s) {
  // C-infinity transition 1 -> 0 on [0, 1].
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - s));
  const double b = std::exp(-1.0 / s);
  return a / (a + b);
}

}  // namespace

double ArcFilter::ideal(double theta) const {
  const double d = std::abs(wrap_angle(theta - window_.center));
  const double u = d / window_.half_width;
  if (u <= 0.5) return 1.0;
  if (u >= 1.0) return 0.0;
  return smooth_step_down(2.0 * (u - 0.5));
}

double ArcFilter::truncated(double theta) const {
  Complex sum(0.0, 0.0);
  for (int n = -degree_; n <= degree_; ++n) {
    sum += coefficient(n) * std::polar(1.0, n * theta);
  }
  return sum.real();
}

ArcFilter ArcFilter::build(const SpectralWindow& window, int degree, int grid) {
  window.validate();
  if (degree < 0) throw ConfigError("filter degree must be nonnegative");
  ArcFilter f;
  f.window_ = window;
  f.degree_ = degree;
  f.coeff_.assign(static_cast<std::size_t>(2 * degree) + 1, Complex(0.0, 0.0));

  // Fourier coefficients by the periodic trapezoid rule; the profile is
  // smooth, so the quadrature error is negligible next to truncation.
  std::vector<double> values(static_cast<std::size_t>(grid));
  for (int t = 0; t < grid; ++t) {
    values[static_cast<std::size_t>(t)] = f.ideal(2.0 * M_PI * t / grid);
  }
  for (int n = -degree; n <= degree; ++n) {
    Complex acc(0.0, 0.0);
    for (int t = 0; t < grid; ++t) {
      acc += values[static_cast<std::size_t>(t)] *
             std::polar(1.0, -n * (2.0 * M_PI * t / grid));
    }
    f.coeff_[static_cast<std::size_t>(n + degree)] = acc / static_cast<double>(grid);
  }

  double bias = 0.0;
  const int fine = 2 * grid;
  for (int t = 0; t < fine; ++t) {
    const double theta = 2.0 * M_PI * t / fine;
    bias = std::max(bias, std::abs(f.truncated(theta) - f.ideal(theta)));
  }
  f.bias_ = bias;
  return f;
}

SmoothingKernel kernel_from_string(const std::string& name) {
  if (name == "fejer") return SmoothingKernel::kFejer;
  if (name == "jackson") return SmoothingKernel::kJackson;
  throw ConfigError("unknown smoothing kernel \"" + name + "\"");
}

const char* to_string(SmoothingKernel k) {
  return k == SmoothingKernel::kFejer ? "fejer" : "jackson";
}

std::vector<double> kernel_coefficients(SmoothingKernel kernel, int degree) {
  std::vector<double> k(static_cast<std::size_t>(degree) + 1, 0.0);
  if (kernel == SmoothingKernel::kFejer) {
    for (int n = 0; n <= degree; ++n) {
      k[static_cast<std::size_t>(n)] = 1.0 - static_cast<double>(n) / (degree + 1);
    }
    return k;
  }
  // Squared Fejer window: convolution of the triangle with itself gives the
  // classical positive kernel of degree 2(m-1) <= degree.
  const int m = degree / 2 + 1;
  auto triangle = [m](int j) {
    return j <= -m || j >= m ? 0.0 : 1.0 - std::abs(j) / static_cast<double>(m);
  };
  double norm = 0.0;
  for (int j = -m + 1; j < m; ++j) norm += triangle(j) * triangle(j);
  for (int n = 0; n <= degree; ++n) {
    double acc = 0.0;
    for (int j = -m + 1; j < m; ++j) acc += triangle(j) * triangle(j - n);
    k[static_cast<std::size_t>(n)] = acc / norm;
  }
  return k;
}

std::vector<double> density_estimate(const MomentSequence& seq, int grid,
                                     SmoothingKernel kernel) {
  if (grid < 1) throw ConfigError("density grid must be positive");
  const std::vector<double> damp = kernel_coefficients(kernel, seq.degree);
  std::vector<double> out(static_cast<std::size_t>(grid), 0.0);
  for (int t = 0; t < grid; ++t) {
    const double theta = 2.0 * M_PI * t / grid;
    double value = damp[0] * seq.at(0).real();
    for (int n = 1; n <= seq.degree; ++n) {
      value += 2.0 * damp[static_cast<std::size_t>(n)] *
               (seq.at(n) * std::polar(1.0, -n * theta)).real();
    }
    out[static_cast<std::size_t>(t)] = value / (2.0 * M_PI);
  }
  return out;
}

std::optional<double> log_log_slope(const std::vector<double>& y, int first, int last) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (int n = first; n <= last && n < static_cast<int>(y.size()); ++n) {
    if (n < 1 || !(y[static_cast<std::size_t>(n)] > 0.0)) continue;
    const double lx = std::log(static_cast<double>(n));
    const double ly = std::log(y[static_cast<std::size_t>(n)]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace treewalk
