#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nhbloch/eig.hpp"
#include "nhbloch/matrix.hpp"
#include "nhbloch/potential.hpp"

namespace nhbloch {

enum class EpClass { Conventional, Dirac, Diabolic, Inconclusive };

// Band indices are 1-based throughout this module; a pair (n, n+1) is
// addressed by its lower index n against the canonical eigenvalue order.
struct CoalescenceMetrics {
  double gap = 0;             // |lambda_{n+1} - lambda_n|
  double overlap = 0;         // |<v_n, v_{n+1}>| of unit right eigenvectors
  double phase_rigidity = 0;  // |<v_L, v_R>| for band n
};

struct DispersionFit {
  double exponent = 0;
  double std_error = 0;
  int points = 0;
};

struct EpReport {
  double k = 0;
  double tau = 0;
  int band_lo = 0;
  double min_gap = 0;
  double overlap_at_min = 0;
  double phase_rigidity_at_min = 0;
  EpClass classification = EpClass::Inconclusive;
  std::optional<DispersionFit> dispersion;
};

struct LoopResult {
  std::vector<int> permutation;  // start slot -> end slot within the tracked set
  double continuity_floor = 1.0;
  int steps_used = 0;
};

// Calibrated against the 2x2 truncation where the exact EP is analytic;
// override as needed.
struct EpOptions {
  double overlap_threshold = 0.999;
  double rigidity_threshold = 0.02;
  double gap_tol = 1e-6;
  double golden_tol = 1e-10;
  double im_tol_dirac = 1e-9;
  double im_tol_conventional = 1e-6;
  int truncation = 32;
};

using PotentialFamily = std::function<PotentialSpec(double tau)>;
using MatrixFamily2D = std::function<Matrix(double p1, double p2)>;

CoalescenceMetrics coalescence_metrics(const Matrix& h, int band_lo);

// Golden-section minimization of the band-pair gap over tau at fixed k,
// followed by coalescence metrics and classification at the minimizer.
EpReport ep_scan(const PotentialFamily& family, double k, int band_lo, double tau_min,
                 double tau_max, const EpOptions& opt = {});

// Probe tau_ep +/- delta for delta in {0.01, 0.02, 0.05}: Conventional when a
// PT transition shows on exactly one side, Dirac when the pair stays real on
// both sides.
EpClass classify_ep(const PotentialFamily& family, double k, int band_lo, double tau_ep,
                    const EpOptions& opt = {});

// Log-log slope of the gap against the tau offset from the EP. side = +1 or
// -1 selects the probing direction; use_im_gap fits |Im(dOmega)| instead
// (the broken-side observable for conventional EPs).
DispersionFit dispersion_exponent(const PotentialFamily& family, double k, int band_lo,
                                  double tau_ep, int side, bool use_im_gap = false,
                                  const EpOptions& opt = {});

// Same fit but varying k at fixed potential (tau pinned by the caller).
DispersionFit k_dispersion_exponent(const PotentialSpec& potential, int band_lo, double k_ep,
                                    int side, const EpOptions& opt = {});

// Few-mode truncations of the momentum-space Hamiltonian, assembled exactly,
// with closed-form eigenvalues where available. The 4x4 model is numeric only.
enum class TruncatedModel { H2, H3, H3_nnn, H4 };

struct TruncatedResult {
  Matrix matrix;
  cvec closed_form;  // empty if not available
  cvec numeric;      // canonical order
};

TruncatedResult truncated_model(TruncatedModel model, double v0, double tau,
                                std::optional<double> omega = std::nullopt,
                                std::optional<double> omega_prime = std::nullopt);

// 2x2 PT-symmetric dimer with detuning: [[delta+ig, t], [t, -delta-ig]],
// eigenvalues +/- sqrt((delta+ig)^2 + t^2).
struct TwoLevelResult {
  Matrix h;
  cxd e_plus, e_minus;  // closed form, principal root
  EigenDecomposition numeric;
};

TwoLevelResult two_level_model(double delta, double g, double t);

struct RiemannMesh {
  std::vector<double> deltas, gs;
  // indexed [ig][id]; sheets continuous away from the branch cuts
  std::vector<std::vector<cxd>> e_plus, e_minus;
};

RiemannMesh riemann_sheet_grid(double delta_min, double delta_max, double g_min,
                               double g_max, double t, int res_delta, int res_g);

// Track eigenpairs around a closed polyline in a 2-parameter space and report
// the induced permutation of the tracked states. tracked_bands empty = all.
LoopResult encircle(const MatrixFamily2D& family,
                    const std::vector<std::pair<double, double>>& loop, int steps,
                    const std::vector<int>& tracked_bands = {});

const char* to_string(EpClass c);

}  // namespace nhbloch
