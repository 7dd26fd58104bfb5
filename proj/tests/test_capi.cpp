// Exercises the extern-C surface end to end through the shared library.

#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "tnsign.h"

#define CHECK(cond)                                                              \
  do {                                                                           \
    if (!(cond)) {                                                               \
      std::fprintf(stderr, "FAILED %s:%d: %s (last error: %s)\n", __FILE__,      \
                   __LINE__, #cond, tnsign_last_error());                        \
      return 1;                                                                  \
    }                                                                            \
  } while (0)

int main() {
  CHECK(std::string(tnsign_version()) == "0.1.0");

  // tensors: contraction against a hand-computed value
  {
    int64_t shape[2] = {2, 2};
    double a[4] = {1, 2, 3, 4};
    double v[2] = {1, 1};
    tnsign_tensor *ta = nullptr, *tv = nullptr, *out = nullptr;
    CHECK(tnsign_tensor_create(shape, 2, a, nullptr, &ta) == TNSIGN_OK);
    CHECK(tnsign_tensor_create(shape, 1, v, nullptr, &tv) == TNSIGN_OK);
    int32_t la[1] = {1}, lb[1] = {0};
    CHECK(tnsign_tensor_contract(ta, la, 1, tv, lb, &out) == TNSIGN_OK);
    double re[2];
    CHECK(tnsign_tensor_entries(out, re, nullptr) == TNSIGN_OK);
    CHECK(std::abs(re[0] - 3.0) < 1e-14);
    CHECK(std::abs(re[1] - 7.0) < 1e-14);
    int32_t rank = 0;
    CHECK(tnsign_tensor_rank(out, &rank) == TNSIGN_OK && rank == 1);

    // svd of the 2x2 matrix
    tnsign_tensor *l = nullptr, *r = nullptr;
    double sigma[2];
    int64_t kept = 0;
    double discarded = 0;
    int32_t left_legs[1] = {0};
    CHECK(tnsign_tensor_svd_split(ta, left_legs, 1, 2, 0.0, &l, &r, sigma, &kept,
                                  &discarded) == TNSIGN_OK);
    CHECK(kept == 2);
    CHECK(std::abs(discarded) < 1e-20);
    // error path: bad leg index -> argument status
    tnsign_tensor* bad = nullptr;
    int32_t badleg[1] = {9};
    CHECK(tnsign_tensor_contract(ta, badleg, 1, tv, lb, &bad) == TNSIGN_ERR_ARGUMENT);
    CHECK(std::strlen(tnsign_last_error()) > 0);
    tnsign_tensor_destroy(ta);
    tnsign_tensor_destroy(tv);
    tnsign_tensor_destroy(out);
    tnsign_tensor_destroy(l);
    tnsign_tensor_destroy(r);
  }

  // networks: brute force vs transfer through the C surface
  {
    const char* spec =
        R"({"kind":"orthogonal","D":2,"lambda":0.4,"rows":3,"cols":3,"seed":11})";
    tnsign_network* net = nullptr;
    CHECK(tnsign_network_sample(spec, &net) == TNSIGN_OK);
    double lm1, pr1, pi1, lm2, pr2, pi2;
    CHECK(tnsign_network_brute_force_value(net, &lm1, &pr1, &pi1) == TNSIGN_OK);
    CHECK(tnsign_network_transfer_value(net, &lm2, &pr2, &pi2) == TNSIGN_OK);
    CHECK(std::abs(lm1 - lm2) < 1e-10);
    CHECK(std::abs(pr1 - pr2) < 1e-10);

    // abs network has a larger magnitude for a signed instance
    tnsign_network* an = nullptr;
    CHECK(tnsign_network_abs(net, &an) == TNSIGN_OK);
    double lma, pra, pia;
    CHECK(tnsign_network_transfer_value(an, &lma, &pra, &pia) == TNSIGN_OK);
    CHECK(lma >= lm2 - 1e-12);

    // JSON round trip preserves the value
    size_t needed = 0;
    CHECK(tnsign_network_to_json(net, nullptr, 0, &needed) == TNSIGN_OK);
    std::vector<char> buf(needed);
    CHECK(tnsign_network_to_json(net, buf.data(), buf.size(), &needed) == TNSIGN_OK);
    tnsign_network* back = nullptr;
    CHECK(tnsign_network_from_json(buf.data(), &back) == TNSIGN_OK);
    double lm3, pr3, pi3;
    CHECK(tnsign_network_transfer_value(back, &lm3, &pr3, &pi3) == TNSIGN_OK);
    CHECK(lm3 == lm2);
    tnsign_network_destroy(net);
    tnsign_network_destroy(an);
    tnsign_network_destroy(back);
  }

  // peps norm network and size-guard status
  {
    tnsign_network* net = nullptr;
    CHECK(tnsign_network_sample_peps(R"({"D":2,"d":4,"rows":2,"cols":2,"seed":5})",
                                     &net) == TNSIGN_OK);
    double lm, pr, pi;
    CHECK(tnsign_network_transfer_value(net, &lm, &pr, &pi) == TNSIGN_OK);
    tnsign_network_destroy(net);

    tnsign_network* big = nullptr;
    CHECK(tnsign_network_sample(
              R"({"kind":"orthogonal","D":4,"rows":11,"cols":2,"seed":1})", &big) ==
          TNSIGN_OK);
    CHECK(tnsign_network_transfer_value(big, &lm, &pr, &pi) == TNSIGN_ERR_SIZE_GUARD);
    tnsign_network_destroy(big);
  }

  // statmech model golden value through the C API
  {
    tnsign_model* m = nullptr;
    CHECK(tnsign_model_build("orthogonal", 3, 1.0 / 3.0, &m) == TNSIGN_OK);
    int64_t q = 0;
    CHECK(tnsign_model_states(m, &q) == TNSIGN_OK && q == 10);
    double s2, zt, zu;
    CHECK(tnsign_model_predicted_entropy(m, 2, 4, "B", "A", &s2, &zt, &zu) == TNSIGN_OK);
    CHECK(std::abs(s2 + (zt - zu)) < 1e-12);
    CHECK(tnsign_model_predicted_entropy(m, 2, 4, "B", "nope", &s2, &zt, &zu) ==
          TNSIGN_ERR_ARGUMENT);
    tnsign_model_destroy(m);
  }

  // delta-f smoke and config validation statuses
  {
    double df = 0, se = 0;
    CHECK(tnsign_cylinder_delta_f(R"({"kind":"orthogonal","D":2,"lambda":5.0,"seed":2})",
                                  3, 80, 10, &df, &se) == TNSIGN_OK);
    CHECK(std::abs(df) < 1e-9);
    CHECK(tnsign_validate_config(
              R"({"experiment":"deltaf","D":[2],"lambda":[0.1],"W":[3],"L":400})") ==
          TNSIGN_OK);
    CHECK(tnsign_validate_config(
              R"({"experiment":"deltaf","D":[4],"lambda":[0.1],"W":[12],"L":400})") ==
          TNSIGN_ERR_CONFIG);
    int64_t rows = 0;
    CHECK(tnsign_run_experiment(
              R"({"experiment":"oracle","D":[2],"lambda":[0.5],"trials":1,
                  "seed":4,"out":"/tmp/tnsign_capi_oracle.csv"})",
              &rows) == TNSIGN_OK);
    CHECK(rows == 4);
    CHECK(tnsign_emit_plot_data("/tmp/definitely_missing.csv", "entropy",
                                "/tmp/x.csv") == TNSIGN_ERR_IO);
  }

  std::puts("capi tests passed");
  return 0;
}
