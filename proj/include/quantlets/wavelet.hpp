#pragma once

#include <Eigen/Dense>

namespace quantlets {

// Decimated orthonormal Daubechies-4 DWT with periodic boundary handling,
// full pyramid down to a block of 4 scaling coefficients.  Layout of the
// output: [scaling block | details coarsest ... details finest].
Eigen::VectorXd dwt_d4(const Eigen::VectorXd& x);
Eigen::VectorXd idwt_d4(const Eigen::VectorXd& w);

struct DenoiseInfo {
  double sigma_hat = 0.0;
  double threshold = 0.0;
  int zeroed = 0;
  bool resampled = false;  // input length was not a power of two
};

// Hard-threshold wavelet denoising: sigma estimated by the median absolute
// deviation (about zero) of the finest-level detail coefficients scaled by
// 1/0.6745, threshold sigma * sqrt(2 log L) applied to every detail level.
Eigen::VectorXd wavelet_denoise(const Eigen::VectorXd& f,
                                DenoiseInfo* info = nullptr);

}  // namespace quantlets
