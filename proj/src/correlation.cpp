#include "uapids/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uapids {

namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Centered {
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double mx = 0.0;
  double my = 0.0;
};

Centered centered_moments(std::span<const double> x, std::span<const double> y) {
  Centered c;
  c.mx = mean(x);
  c.my = mean(y);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - c.mx;
    const double dy = y[i] - c.my;
    c.sxy += dx * dy;
    c.sxx += dx * dx;
    c.syy += dy * dy;
  }
  return c;
}

}  // namespace

std::optional<double> pcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const Centered c = centered_moments(x, y);
  if (!(c.sxx > 0.0) || !(c.syy > 0.0)) return std::nullopt;
  const double r = c.sxy / (std::sqrt(c.sxx) * std::sqrt(c.syy));
  return std::clamp(r, -1.0, 1.0);
}

std::optional<std::vector<double>> pcc_gradient(std::span<const double> u, std::span<const double> w) {
  if (u.size() != w.size() || u.size() < 2) return std::nullopt;
  const Centered c = centered_moments(u, w);
  if (!(c.sxx > 0.0) || !(c.syy > 0.0)) return std::nullopt;
  const double nu = std::sqrt(c.sxx);
  const double nw = std::sqrt(c.syy);
  const double r = c.sxy / (nu * nw);
  // Centered vectors sum to zero, so the mean subtraction drops out of the
  // derivative: dr/du_i = wc_i / (|uc||wc|) - r * uc_i / |uc|^2.
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double uc = u[i] - c.mx;
    const double wc = w[i] - c.my;
    g[i] = wc / (nu * nw) - r * uc / c.sxx;
  }
  return g;
}

std::optional<double> cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) return std::nullopt;
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (!(uu > 0.0) || !(vv > 0.0)) return std::nullopt;
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

std::optional<std::vector<double>> cosine_gradient(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) return std::nullopt;
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (!(uu > 0.0) || !(vv > 0.0)) return std::nullopt;
  const double nu = std::sqrt(uu);
  const double nv = std::sqrt(vv);
  const double cos = uv / (nu * nv);
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = v[i] / (nu * nv) - cos * u[i] / uu;
  return g;
}

}  // namespace uapids
