#ifndef CHANSTAB_SPECTRUM_HPP_
#define CHANSTAB_SPECTRUM_HPP_

#include <vector>

#include "chanstab/base_flow.hpp"
#include "chanstab/cheb.hpp"
#include "chanstab/fields.hpp"
#include "chanstab/params.hpp"

namespace chanstab {

struct Spectrum {
  std::vector<Complex> eigenvalues;
  std::vector<ModeBundle> eigenvectors;
  std::vector<bool> physical;     // survives the resolution-refinement test
  std::vector<Real> drift;        // relative movement under n -> 1.5 n
  int n_used = 0;
  int n_refined = 0;
};

// All eigenvalues of the collocated eigenvalue problem (no windowing).
std::vector<Complex> direct_eigenvalues(const Params& params, const BaseFlow& flow,
                                        const ChebGrid& grid);

// Eigenvalues inside |c - window_center| <= window_radius, flagged physical
// when they persist (relative 1e-6) on a grid 1.5x finer. Requires mach > 0.
// Throws NoEigenvalueInWindow / ResolutionFailure.
Spectrum direct_spectrum(const Params& params, const BaseFlow& flow, const ChebGrid& grid,
                         Complex window_center, Real window_radius);

}  // namespace chanstab

#endif  // CHANSTAB_SPECTRUM_HPP_
