#pragma once

#include "hflow/grid.hpp"
#include "hflow/multiplier.hpp"

namespace hflow {

/// Hilbert transform: multiply mode k by -i*sgn(k). The mean maps to 0.
/// The Nyquist mode also maps to 0: its conjugate pair sits at the same
/// grid frequency and the transformed sine samples to zero on the grid.
GridFunction hilbert_transform(const GridFunction& f);

/// Coefficient-wise product symbol(|k|) * c_k. Output is real and mean-free
/// (symbol(0) = 0).
GridFunction apply_multiplier(const GridFunction& f, const Multiplier& m);

/// Spectral derivative, multiplier i*k (Nyquist mode dropped).
GridFunction derivative(const GridFunction& f);

/// 2/3-rule truncation: zero all modes with |k-index| > n/3. Idempotent.
GridFunction dealias(const GridFunction& f);

GridFunction add(const GridFunction& a, const GridFunction& b);
GridFunction scale(const GridFunction& f, double s);
/// Pointwise product in physical space (no dealiasing applied here).
GridFunction multiply(const GridFunction& a, const GridFunction& b);

/// sup_j |d theta / dx (x_j)|.
double grad_sup_norm(const GridFunction& f);

/// Fraction of (mean-free) spectral energy carried by the top third of the
/// band kept by the 2/3 rule, i.e. indices in (2n/9, n/3]. A resolved field
/// keeps this tiny; energy piling up against the dealiasing cutoff drives
/// it up. Returns 0 for zero fields.
double spectrum_tail_fraction(const GridFunction& f);

}  // namespace hflow
