#pragma once

#include <cstdint>
#include <string>

#include "cfmimo/matrix.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/system_config.hpp"

namespace cfmimo {

// S1: orthogonal pilots, no shadowing. S2: pseudo-noise pilots (pilot
// contamination), no shadowing. S3: orthogonal pilots with shadowing.
enum class Scenario { S1, S2, S3 };

Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);

bool scenario_has_shadowing(Scenario s);
bool scenario_has_orthogonal_pilots(Scenario s);

/// 3-D distance between a user and an AP on the wrapped square: per-axis
/// torus delta combined with the fixed antenna-height gap as a vertical leg.
double wrap_distance(double x1, double y1, double x2, double y2,
                     const SystemConfig& cfg);

/// Fixed Hata-COST231 offset at (f0, h_AP, h_MS), dB. ~140.715 dB at the
/// default 1.9 GHz / 15 m / 1.65 m.
double hata_cost231_offset_db(const SystemConfig& cfg);

/// Three-slope path loss, dB (negative). Throws std::invalid_argument on
/// non-positive distance.
double path_loss_db(double distance_m, const SystemConfig& cfg);

/// K x M linear-scale large-scale fading: path loss plus log-normal
/// shadowing 10^(sigma_sh * z / 10).
Matrix large_scale_coefficients(const Matrix& user_pos, const Matrix& ap_pos,
                                const Matrix& shadow_z, const SystemConfig& cfg);

/// Unit-norm pilot columns, tau_p x K. S1/S3 produce orthonormal columns;
/// S2 produces cyclic shifts of an m-sequence with nonzero cross-correlation.
Matrix generate_pilots(Scenario scenario, int tau_p, int num_users);

/// Pilot Gram matrix phi^T phi, K x K.
Matrix pilot_gram(const Matrix& pilots);

/// LMMSE estimation scalars alpha_{k,m} given beta and the pilot Gram.
Matrix lmmse_alpha(const Matrix& beta, const Matrix& gram, const SystemConfig& cfg);

/// gamma_{k,m} = sqrt(eta_k) * N_AP * alpha_{k,m} * beta_{k,m}.
Matrix gamma_matrix(const Matrix& alpha, const Matrix& beta, const SystemConfig& cfg);

// One drawn network: positions, shadowing, large-scale coefficients, pilots
// and the derived estimation statistics.
struct NetworkRealization {
  Matrix ap_positions;    // M x 2
  Matrix user_positions;  // K x 2
  Matrix shadow_z;        // K x M
  Matrix beta;            // K x M
  Matrix pilots;          // tau_p x K
  Matrix gram;            // K x K
  Matrix alpha;           // K x M
  Matrix gamma;           // K x M
  std::uint64_t instance_seed = 0;
};

/// Assembles a realization from drawn positions and shadowing values.
NetworkRealization make_realization(Matrix ap_pos, Matrix user_pos, Matrix shadow_z,
                                    Scenario scenario, const SystemConfig& cfg);

/// Uniform positions on the square, n x 2.
Matrix draw_positions(int n, double area_side, Rng& rng);

}  // namespace cfmimo
