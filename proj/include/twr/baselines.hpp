#pragma once

// Simple relay schemes used as comparison points. These are stand-ins with
// documented formulas, not reproductions of any specific published design.

#include <optional>
#include <string>

#include "twr/model.hpp"

namespace twr {

enum class BaselineKind { ScaledIdentity, AntennaSelection, ZeroForcing, MmseRelay };

const char* to_string(BaselineKind k);
/// Accepts "identity", "antenna-selection", "zf", "mmse".
std::optional<BaselineKind> parse_baseline(const std::string& name);

/// Theta = sum_i p_i h_i h_i^H + Lambda_R; the relay power is tr(A Theta A^H).
CMatrix relay_input_covariance(const SystemInstance& inst);

/// Scales A so that the relay budget is met with equality.
CMatrix scale_to_budget(const SystemInstance& inst, const CMatrix& A);

/// - ScaledIdentity: c I
/// - AntennaSelection: c e_m e_m^T for the antenna m with the best min_i SINR_i / gamma_i
/// - ZeroForcing: c H^* (H^T H^*)^-1 P (H^H H)^-1 H^H, P the pair swap, H = [h_1 ... h_2K]
/// - MmseRelay: as ZeroForcing with both inverses regularized by (N0 / p) I
/// Every output meets the relay budget with equality. ZeroForcing and
/// MmseRelay need M >= 2K (DomainError otherwise).
CMatrix baseline_beamformer(BaselineKind kind, const SystemInstance& inst);

}  // namespace twr
