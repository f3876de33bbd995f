#pragma once

#include <random>
#include <string>

#include "ota/types.hpp"

namespace ota {

struct ThetaValidation {
  bool ok = false;
  std::string error;  // names the violated constraint when !ok
};

// Membership test for the family's parameter set. Boundary points are admitted with
// 1e-9 relative slack so worst-case parameters survive round-trips through doubles.
ThetaValidation validate_theta(const ModelSpec& model, const Vector& theta, int d);

// Draws an n x d matrix of user samples, row i = user i's observation, i.i.d. over users
// and (for the Bernoulli families) over coordinates. Throws ConfigError on an
// inadmissible theta.
Matrix sample_users(const ModelSpec& model, const Vector& theta, int n, std::mt19937_64& rng);

}  // namespace ota
