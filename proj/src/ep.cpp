#include "nhbloch/ep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nhbloch/bloch.hpp"

namespace nhbloch {

namespace {

void check_pair(int band_lo, int dim) {
  if (band_lo < 1 || band_lo + 1 > dim)
    throw std::invalid_argument("band pair (" + std::to_string(band_lo) + ", " +
                                std::to_string(band_lo + 1) + ") out of range for dimension " +
                                std::to_string(dim));
}

double pair_gap(const Matrix& h, int band_lo) {
  const cvec vals = eig_values_only(h);
  return std::abs(vals[band_lo] - vals[band_lo - 1]);
}

Matrix family_matrix(const PotentialFamily& family, double tau, double k, int M) {
  return build_bloch(family(tau), k, M).entries;
}

// Least-squares line through (x, y); returns slope with its standard error.
DispersionFit fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - slope * x[i] - intercept;
    ss += r * r;
  }
  DispersionFit f;
  f.exponent = slope;
  f.points = n;
  if (n > 2) f.std_error = std::sqrt(ss / (n - 2) / (sxx - sx * sx / n));
  return f;
}

}  // namespace

CoalescenceMetrics coalescence_metrics(const Matrix& h, int band_lo) {
  check_pair(band_lo, h.rows());
  const EigenDecomposition right = eig(h);
  CoalescenceMetrics m;
  const int i = band_lo - 1;
  m.gap = std::abs(right.eigenvalues[i + 1] - right.eigenvalues[i]);
  m.overlap = std::abs(dot(right.right_eigenvectors[i], right.right_eigenvectors[i + 1]));
  // left eigenvector of band n = right eigenvector of H^H at conj(lambda_n)
  const EigenDecomposition left = eig(h.adjoint());
  const cxd target = std::conj(right.eigenvalues[i]);
  int best = 0;
  for (int j = 1; j < static_cast<int>(left.eigenvalues.size()); ++j)
    if (std::abs(left.eigenvalues[j] - target) < std::abs(left.eigenvalues[best] - target))
      best = j;
  m.phase_rigidity = std::abs(dot(left.right_eigenvectors[best], right.right_eigenvectors[i]));
  return m;
}

EpClass classify_ep(const PotentialFamily& family, double k, int band_lo,
                    double tau_ep, const EpOptions& opt) {
  const double deltas[] = {0.01, 0.02, 0.05};
  int conventional_votes = 0, dirac_votes = 0;
  for (double d : deltas) {
    bool broken[2];
    for (int side = 0; side < 2; ++side) {
      const double tau = tau_ep + (side == 0 ? -d : +d);
      const cvec vals = eig_values_only(family_matrix(family, tau, k, opt.truncation));
      const double im_split = std::abs(std::imag(vals[band_lo] - vals[band_lo - 1]));
      const double im_max = std::max(std::abs(vals[band_lo].imag()),
                                     std::abs(vals[band_lo - 1].imag()));
      broken[side] = im_split > opt.im_tol_conventional || im_max > opt.im_tol_conventional;
      if (im_max > opt.im_tol_dirac && !broken[side]) broken[side] = true;
    }
    if (broken[0] != broken[1])
      ++conventional_votes;
    else if (!broken[0] && !broken[1])
      ++dirac_votes;
  }
  if (conventional_votes == 3) return EpClass::Conventional;
  if (dirac_votes == 3) return EpClass::Dirac;
  return EpClass::Inconclusive;
}

EpReport ep_scan(const PotentialFamily& family, double k, int band_lo, double tau_min,
                 double tau_max, const EpOptions& opt) {
  if (!(tau_min < tau_max)) throw std::invalid_argument("ep_scan: empty tau window");
  auto gap_at = [&](double tau) { return pair_gap(family_matrix(family, tau, k, opt.truncation), band_lo); };

  // golden-section minimization; fall back to a dense scan if the window does
  // not bracket an interior minimum
  const double phi = 0.61803398874989484820;
  double a = tau_min, b = tau_max;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = gap_at(x1), f2 = gap_at(x2);
  while (b - a > opt.golden_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = gap_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = gap_at(x2);
    }
  }
  double tau_star = (a + b) / 2;
  if (tau_star - tau_min < 10 * opt.golden_tol || tau_max - tau_star < 10 * opt.golden_tol) {
    // edge minimizer: dense rescan, else give up
    double best_tau = tau_star, best_gap = gap_at(tau_star);
    for (double tau = tau_min; tau <= tau_max; tau += 1e-4) {
      const double g = gap_at(tau);
      if (g < best_gap) {
        best_gap = g;
        best_tau = tau;
      }
    }
    tau_star = best_tau;
    if (best_tau - tau_min < 2e-4 || tau_max - best_tau < 2e-4) {
      EpReport r;
      r.k = k;
      r.tau = tau_star;
      r.band_lo = band_lo;
      r.min_gap = best_gap;
      r.classification = EpClass::Inconclusive;
      return r;
    }
  }

  const Matrix h = family_matrix(family, tau_star, k, opt.truncation);
  const CoalescenceMetrics m = coalescence_metrics(h, band_lo);
  EpReport r;
  r.k = k;
  r.tau = tau_star;
  r.band_lo = band_lo;
  r.min_gap = m.gap;
  r.overlap_at_min = m.overlap;
  r.phase_rigidity_at_min = m.phase_rigidity;

  const bool coalesced = m.overlap > opt.overlap_threshold &&
                         m.phase_rigidity < opt.rigidity_threshold;
  if (coalesced) {
    r.classification = classify_ep(family, k, band_lo, tau_star, opt);
  } else if (m.gap < opt.gap_tol && m.overlap < 0.5) {
    r.classification = EpClass::Diabolic;
  } else {
    r.classification = EpClass::Inconclusive;
  }

  if (r.classification == EpClass::Conventional) {
    // broken-side |Im dOmega| carries the square-root scaling
    const cvec hi = eig_values_only(family_matrix(family, tau_star + 0.02, k, opt.truncation));
    const cvec lo = eig_values_only(family_matrix(family, tau_star - 0.02, k, opt.truncation));
    const double im_hi = std::abs(std::imag(hi[band_lo] - hi[band_lo - 1]));
    const double im_lo = std::abs(std::imag(lo[band_lo] - lo[band_lo - 1]));
    const int side = im_hi >= im_lo ? +1 : -1;
    r.dispersion = dispersion_exponent(family, k, band_lo, tau_star, side, true, opt);
  } else if (r.classification == EpClass::Dirac) {
    r.dispersion = dispersion_exponent(family, k, band_lo, tau_star, +1, false, opt);
  }
  return r;
}

DispersionFit dispersion_exponent(const PotentialFamily& family, double k, int band_lo,
                                  double tau_ep, int side, bool use_im_gap,
                                  const EpOptions& opt) {
  const int n_samples = 12;
  // the residual gap measured at the EP itself is pure eigensolver noise;
  // samples not safely above that floor would flatten the log-log slope
  const cvec ep_vals = eig_values_only(family_matrix(family, tau_ep, k, opt.truncation));
  const double noise = std::abs(ep_vals[band_lo] - ep_vals[band_lo - 1]);
  const double floor = std::max(1e-12, 50.0 * noise);
  std::vector<double> lx, ly;
  for (int i = 0; i < n_samples; ++i) {
    const double dt = std::pow(10.0, -4.0 + 3.0 * i / (n_samples - 1));  // 1e-4 .. 1e-1
    const cvec vals =
        eig_values_only(family_matrix(family, tau_ep + side * dt, k, opt.truncation));
    const cxd dw = vals[band_lo] - vals[band_lo - 1];
    const double gap = use_im_gap ? std::abs(dw.imag()) : std::abs(dw);
    if (gap < floor) continue;
    lx.push_back(std::log(dt));
    ly.push_back(std::log(gap));
  }
  if (lx.size() < 3)
    throw std::runtime_error("dispersion_exponent: gap below the noise floor at all samples, "
                             "fit refused");
  return fit_slope(lx, ly);
}

DispersionFit k_dispersion_exponent(const PotentialSpec& potential, int band_lo, double k_ep,
                                    int side, const EpOptions& opt) {
  const int n_samples = 12;
  const cvec ep_vals = eig_values_only(build_bloch(potential, k_ep, opt.truncation).entries);
  const double noise = std::abs(ep_vals[band_lo] - ep_vals[band_lo - 1]);
  const double floor = std::max(1e-12, 50.0 * noise);
  std::vector<double> lx, ly;
  for (int i = 0; i < n_samples; ++i) {
    const double dk = std::pow(10.0, -4.0 + 3.0 * i / (n_samples - 1));
    const Matrix h = build_bloch(potential, k_ep + side * dk, opt.truncation).entries;
    const cvec vals = eig_values_only(h);
    const double gap = std::abs(vals[band_lo] - vals[band_lo - 1]);
    if (gap < floor) continue;
    lx.push_back(std::log(dk));
    ly.push_back(std::log(gap));
  }
  if (lx.size() < 3)
    throw std::runtime_error("k_dispersion_exponent: gap below the noise floor at all samples, "
                             "fit refused");
  return fit_slope(lx, ly);
}

TruncatedResult truncated_model(TruncatedModel model, double v0, double tau,
                                std::optional<double> omega_opt,
                                std::optional<double> omega_prime_opt) {
  const double tm = v0 * (1.0 - tau) / 2.0;
  const double tp = v0 * (1.0 + tau) / 2.0;
  const cxd t = std::sqrt(cxd(tm * tp));  // imaginary past tau = 1
  TruncatedResult r;
  switch (model) {
    case TruncatedModel::H2: {
      const double w = omega_opt.value_or(0.25);
      r.matrix = Matrix(2, 2);
      r.matrix(0, 0) = r.matrix(1, 1) = w;
      r.matrix(0, 1) = tm;
      r.matrix(1, 0) = tp;
      r.closed_form = {w - t, w + t};
      break;
    }
    case TruncatedModel::H3: {
      const double w = omega_opt.value_or(1.0);
      r.matrix = Matrix(3, 3);
      r.matrix(0, 0) = r.matrix(2, 2) = w;
      r.matrix(0, 1) = r.matrix(1, 2) = tm;
      r.matrix(1, 0) = r.matrix(2, 1) = tp;
      const cxd root = std::sqrt(cxd(w * w) + 8.0 * t * t);
      r.closed_form = {cxd(w), (w - root) / 2.0, (w + root) / 2.0};
      break;
    }
    case TruncatedModel::H3_nnn: {
      const double w = omega_opt.value_or(1.0);
      r.matrix = Matrix(3, 3);
      r.matrix(0, 0) = r.matrix(2, 2) = w;
      r.matrix(0, 1) = r.matrix(1, 2) = tm;
      r.matrix(1, 0) = r.matrix(2, 1) = tp;
      r.matrix(0, 2) = tm;  // added NNN couplings
      r.matrix(2, 0) = tp;
      if (std::abs(w - v0 / 2.0) < 1e-12) {
        const cxd s3t = std::sqrt(cxd(3.0)) * t;
        r.closed_form = {cxd(0.0), w - s3t, w + s3t};
      }
      break;
    }
    case TruncatedModel::H4: {
      const double w = omega_opt.value_or(0.25);
      const double wp = omega_prime_opt.value_or(2.25);
      r.matrix = Matrix(4, 4);
      r.matrix(0, 0) = r.matrix(3, 3) = wp;
      r.matrix(1, 1) = r.matrix(2, 2) = w;
      r.matrix(0, 1) = r.matrix(0, 2) = tm;
      r.matrix(1, 2) = r.matrix(1, 3) = tm;
      r.matrix(2, 3) = tm;
      r.matrix(1, 0) = r.matrix(2, 0) = tp;
      r.matrix(2, 1) = r.matrix(3, 1) = tp;
      r.matrix(3, 2) = tp;
      // no trustworthy closed form; numeric only
      break;
    }
  }
  r.numeric = eig_values_only(r.matrix);
  // pair closed-form values with their numeric counterparts; canonical order
  // is unstable for conjugate pairs whose real parts tie only up to roundoff
  if (!r.closed_form.empty()) {
    cvec paired(r.closed_form.size());
    std::vector<bool> used(r.closed_form.size(), false);
    for (size_t i = 0; i < r.numeric.size(); ++i) {
      size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < r.closed_form.size(); ++j) {
        if (used[j]) continue;
        const double d = std::abs(r.closed_form[j] - r.numeric[i]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      used[best] = true;
      paired[i] = r.closed_form[best];
    }
    r.closed_form = std::move(paired);
  }
  return r;
}

TwoLevelResult two_level_model(double delta, double g, double t) {
  TwoLevelResult r;
  r.h = Matrix(2, 2);
  r.h(0, 0) = cxd(delta, g);
  r.h(1, 1) = -cxd(delta, g);
  r.h(0, 1) = r.h(1, 0) = t;
  const cxd e = std::sqrt(cxd(delta, g) * cxd(delta, g) + cxd(t * t));
  r.e_plus = e;
  r.e_minus = -e;
  r.numeric = eig(r.h);
  return r;
}

RiemannMesh riemann_sheet_grid(double delta_min, double delta_max, double g_min,
                               double g_max, double t, int res_delta, int res_g) {
  if (res_delta < 16 || res_g < 16)
    throw std::invalid_argument("riemann_sheet_grid: resolution must be >= 16 per axis");
  RiemannMesh mesh;
  mesh.deltas.resize(res_delta);
  mesh.gs.resize(res_g);
  for (int i = 0; i < res_delta; ++i)
    mesh.deltas[i] = delta_min + (delta_max - delta_min) * i / (res_delta - 1);
  for (int j = 0; j < res_g; ++j)
    mesh.gs[j] = g_min + (g_max - g_min) * j / (res_g - 1);
  mesh.e_plus.assign(res_g, cvec(res_delta));
  mesh.e_minus.assign(res_g, cvec(res_delta));
  cxd row_anchor;
  for (int j = 0; j < res_g; ++j) {
    for (int i = 0; i < res_delta; ++i) {
      const cxd z = cxd(mesh.deltas[i], mesh.gs[j]);
      const cxd e = std::sqrt(z * z + cxd(t * t));
      cxd pick = e;
      if (i > 0) {
        // continuity along the sweep keeps each sheet off the branch cut
        const cxd prev = mesh.e_plus[j][i - 1];
        if (std::abs(-e - prev) < std::abs(e - prev)) pick = -e;
      } else if (j > 0) {
        if (std::abs(-e - row_anchor) < std::abs(e - row_anchor)) pick = -e;
      }
      mesh.e_plus[j][i] = pick;
      mesh.e_minus[j][i] = -pick;
      if (i == 0) row_anchor = pick;
    }
  }
  return mesh;
}

LoopResult encircle(const MatrixFamily2D& family,
                    const std::vector<std::pair<double, double>>& loop, int steps,
                    const std::vector<int>& tracked_bands) {
  if (loop.size() < 2) throw std::invalid_argument("encircle: need at least 2 vertices");
  if (steps < 256) throw std::invalid_argument("encircle: steps must be >= 256");

  auto point_at = [&](double u) {  // u in [0, 1) along the closed polyline
    const int nseg = static_cast<int>(loop.size());
    std::vector<double> lens(nseg);
    double total = 0;
    for (int i = 0; i < nseg; ++i) {
      const auto& p = loop[i];
      const auto& q = loop[(i + 1) % nseg];
      lens[i] = std::hypot(q.first - p.first, q.second - p.second);
      total += lens[i];
    }
    double target = u * total;
    for (int i = 0; i < nseg; ++i) {
      if (target <= lens[i] || i == nseg - 1) {
        const double f = lens[i] > 0 ? target / lens[i] : 0;
        const auto& p = loop[i];
        const auto& q = loop[(i + 1) % nseg];
        return std::make_pair(p.first + f * (q.first - p.first),
                              p.second + f * (q.second - p.second));
      }
      target -= lens[i];
    }
    return loop[0];
  };

  std::string failure;
  for (int attempt = 0; attempt < 3; ++attempt, steps *= 2) {
    const auto start = point_at(0.0);
    const EigenDecomposition d0 = eig(family(start.first, start.second));
    const int dim = static_cast<int>(d0.eigenvalues.size());
    std::vector<int> tracked = tracked_bands;
    if (tracked.empty())
      for (int b = 1; b <= dim; ++b) tracked.push_back(b);
    const int nt = static_cast<int>(tracked.size());
    std::vector<cvec> initial(nt), current(nt);
    for (int i = 0; i < nt; ++i) {
      check_pair(std::max(tracked[i] - 1, 1), dim);
      initial[i] = d0.right_eigenvectors[tracked[i] - 1];
      current[i] = initial[i];
    }

    double floor = 1.0;
    double worst_u = 0;
    for (int s = 1; s <= steps; ++s) {
      const double u = double(s % steps) / steps;
      const auto pt = point_at(u);
      const EigenDecomposition d = eig(family(pt.first, pt.second));
      std::vector<bool> used(dim, false);
      std::vector<cvec> next(nt);
      for (int i = 0; i < nt; ++i) {
        // permutation assignment by unconjugated product magnitude
        int best = -1;
        double best_ov = -1;
        for (int c = 0; c < dim; ++c) {
          if (used[c]) continue;
          const double ov = std::abs(dotu(current[i], d.right_eigenvectors[c]));
          if (ov > best_ov) {
            best_ov = ov;
            best = c;
          }
        }
        used[best] = true;
        next[i] = d.right_eigenvectors[best];
        const double cont = std::abs(dot(current[i], next[i]));
        if (cont < floor) {
          floor = cont;
          worst_u = u;
        }
      }
      current = std::move(next);
    }

    if (floor > 0.9) {
      LoopResult r;
      r.continuity_floor = floor;
      r.steps_used = steps;
      r.permutation.resize(nt);
      std::vector<bool> used(nt, false);
      for (int i = 0; i < nt; ++i) {
        int best = -1;
        double best_ov = -1;
        for (int j = 0; j < nt; ++j) {
          if (used[j]) continue;
          const double ov = std::abs(dotu(current[i], initial[j]));
          if (ov > best_ov) {
            best_ov = ov;
            best = j;
          }
        }
        used[best] = true;
        r.permutation[i] = best;
      }
      return r;
    }
    failure = "encircle: continuity floor " + std::to_string(floor) +
              " at loop parameter u=" + std::to_string(worst_u) + " with " +
              std::to_string(steps) + " steps";
  }
  throw std::runtime_error(failure);
}

const char* to_string(EpClass c) {
  switch (c) {
    case EpClass::Conventional: return "conventional";
    case EpClass::Dirac: return "dirac";
    case EpClass::Diabolic: return "diabolic";
    default: return "inconclusive";
  }
}

}  // namespace nhbloch
