#pragma once

#include <span>
#include <vector>

#include "core/model.hpp"

namespace ks1d {

/// Interior face fluxes F_{i+1/2}, i = 0..n-2, of the u-equation written as
/// u_t = (a(u) u_x - chi u v_x)_x. Boundary faces carry zero flux, so the cell
/// rate (F_{i+1/2} - F_{i-1/2}) / h telescopes to zero total.
struct FluxAssembly {
  std::vector<double> diffusive;    // a(u_face) (u_{i+1} - u_i) / h
  std::vector<double> chemotactic;  // -chi u_upw (v_{i+1} - v_i) / h

  double total(std::size_t face) const { return diffusive[face] + chemotactic[face]; }
};

/// a((u_i + u_{i+1}) / 2) on interior faces.
std::vector<double> face_diffusivity(std::span<const double> u, const DiffusionModel& model);

FluxAssembly assemble_u_fluxes(const State& state, const Params& params, const DiffusionModel& model,
                               const GridSpec& grid);

/// Divergence of face fluxes with zero boundary faces.
CellField flux_divergence(std::span<const double> faces, const GridSpec& grid);

CellField assemble_u_rhs(const State& state, const Params& params, const DiffusionModel& model,
                         const GridSpec& grid);
/// Only the chemotactic (upwinded, explicit) part of the u rate.
CellField chemotaxis_rates(const State& state, const Params& params, const GridSpec& grid);

/// (D lap_h v + u - M + gamma v) / eps.
CellField assemble_v_rhs(const State& state, const Params& params, const GridSpec& grid);

/// Three-point Laplacian with reflected (zero-gradient) ghost cells.
CellField laplacian_neumann(std::span<const double> f, const GridSpec& grid);

/// max_i |chi (v_{i+1} - v_i) / h|, the discrete chemotactic speed.
double max_chemotactic_speed(std::span<const double> v, double chi, const GridSpec& grid);

/// Solves (I - dt L_c) x = f, with L_c the Neumann flux-form operator
/// (L_c x)_i = [c_{i+1/2}(x_{i+1} - x_i) - c_{i-1/2}(x_i - x_{i-1})] / h^2.
/// `coeff_faces` has n-1 nonnegative entries. Thomas algorithm; the system is
/// an M-matrix so f >= 0 gives x >= 0.
CellField implicit_diffusion_solve(std::span<const double> f, std::span<const double> coeff_faces,
                                   double dt, const GridSpec& grid);

/// max_i |((I - dt L_c) x - f)_i|.
double implicit_residual(std::span<const double> x, std::span<const double> f,
                         std::span<const double> coeff_faces, double dt, const GridSpec& grid);

}  // namespace ks1d
