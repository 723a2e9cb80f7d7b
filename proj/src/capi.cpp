#include "ncaf.h"

#include "scenario.h"

#include <json.hpp>

#include <cstring>
#include <string>

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Maps the library's exception families onto the C error codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ncaf::dimension_mismatch& ex) {
    set_error(ex.what());
    return NCAF_ESHAPE;
  } catch (const ncaf::shape_error& ex) {
    set_error(ex.what());
    return NCAF_ESHAPE;
  } catch (const nlohmann::json::exception& ex) {
    set_error(ex.what());
    return NCAF_EPARSE;
  } catch (const std::invalid_argument& ex) {
    set_error(ex.what());
    return NCAF_EINVAL;
  } catch (const std::runtime_error& ex) {
    set_error(ex.what());
    const std::string what = ex.what();
    return what.find("file") != std::string::npos ? NCAF_EIO : NCAF_EINVAL;
  } catch (const std::exception& ex) {
    set_error(ex.what());
    return NCAF_EINVAL;
  } catch (...) {
    set_error("unknown error");
    return NCAF_EINVAL;
  }
}

}  // namespace

struct ncaf_basis {
  ncaf::GeneratorBasis gb;
};

struct ncaf_step {
  ncaf::BratteliStep step;
  ncaf::AdaptedBasis adapted;
};

extern "C" {

const char* ncaf_version(void) { return "0.1.0"; }

const char* ncaf_last_error(void) { return g_last_error.c_str(); }

ncaf_basis* ncaf_basis_create(const int* dims, int n_factors) {
  ncaf_basis* out = nullptr;
  guarded([&]() -> int {
    if (dims == nullptr || n_factors <= 0) throw std::invalid_argument("dims must be nonempty");
    ncaf::AlgebraShape shape;
    shape.dims.assign(dims, dims + n_factors);
    out = new ncaf_basis{ncaf::build_basis(shape)};
    return NCAF_OK;
  });
  return out;
}

void ncaf_basis_free(ncaf_basis* b) { delete b; }

int ncaf_basis_count(const ncaf_basis* b, int factor) {
  if (b == nullptr || factor < 0 || factor >= b->gb.shape.factors()) {
    set_error("bad basis handle or factor index");
    return -1;
  }
  return b->gb.count(factor);
}

ncaf_step* ncaf_step_parse(const char* json_text) {
  ncaf_step* out = nullptr;
  guarded([&]() -> int {
    if (json_text == nullptr) throw std::invalid_argument("json_text is null");
    ncaf::BratteliStep step = ncaf::load_step_json(json_text);
    ncaf::AdaptedBasis adapted = ncaf::adapted_basis(step, ncaf::build_basis(step.shapeA));
    out = new ncaf_step{std::move(step), std::move(adapted)};
    return NCAF_OK;
  });
  return out;
}

void ncaf_step_free(ncaf_step* s) { delete s; }

int ncaf_step_counts(const ncaf_step* s, int factor, int* inherited, int* complement) {
  return guarded([&]() -> int {
    if (s == nullptr || inherited == nullptr || complement == nullptr)
      throw std::invalid_argument("null argument");
    if (factor < 0 || factor >= s->step.shapeB.factors())
      throw std::invalid_argument("factor index out of range");
    *inherited = s->adapted.inherited_count(factor);
    *complement = s->adapted.complement_count(factor);
    return NCAF_OK;
  });
}

int ncaf_step_family_sizes(const ncaf_step* s, int factor, int sizes[5]) {
  return guarded([&]() -> int {
    if (s == nullptr || sizes == nullptr) throw std::invalid_argument("null argument");
    if (factor < 0 || factor >= s->step.shapeB.factors())
      throw std::invalid_argument("factor index out of range");
    for (int t = 0; t < 5; ++t) sizes[t] = s->adapted.family_sizes[factor][t];
    return NCAF_OK;
  });
}

int ncaf_step_k0_push(const ncaf_step* s, const long long* v, int n, long long* out, int m) {
  return guarded([&]() -> int {
    if (s == nullptr || v == nullptr || out == nullptr)
      throw std::invalid_argument("null argument");
    if (n != s->step.shapeA.factors() || m != s->step.shapeB.factors())
      throw ncaf::dimension_mismatch("class vector lengths must match the step");
    Eigen::VectorX<long long> vin(n);
    for (int i = 0; i < n; ++i) vin(i) = v[i];
    const Eigen::VectorX<long long> pushed = ncaf::k0_push(s->step, vin);
    for (int k = 0; k < m; ++k) out[k] = pushed(k);
    return NCAF_OK;
  });
}

int ncaf_minimize(const ncaf_step* s, const double* lambda, int n_lambda, uint64_t seed,
                  int restarts, int threads, double* vmin, int* converged) {
  return guarded([&]() -> int {
    if (s == nullptr || lambda == nullptr || vmin == nullptr || converged == nullptr)
      throw std::invalid_argument("null argument");
    if (n_lambda != s->step.shapeA.factors())
      throw ncaf::dimension_mismatch("lambda length must match the source factors");
    ncaf::MinimizerConfig mcfg;
    if (restarts > 0) mcfg.restarts = restarts;
    if (threads > 0) mcfg.threads = threads;
    Eigen::VectorXd lam(n_lambda);
    for (int i = 0; i < n_lambda; ++i) lam(i) = lambda[i];
    const ncaf::PointResult p = ncaf::minimize(s->adapted, lam, mcfg, seed);
    *vmin = p.vmin;
    *converged = p.converged ? 1 : 0;
    if (!p.converged) {
      set_error("minimizer finished above the gradient tolerance");
      return NCAF_ENOCONV;
    }
    return NCAF_OK;
  });
}

int ncaf_ko_signs(int d, int* eps, int* eps_prime, int* eps_dprime) {
  return guarded([&]() -> int {
    if (eps == nullptr || eps_prime == nullptr || eps_dprime == nullptr)
      throw std::invalid_argument("null argument");
    const ncaf::KOSigns ks = ncaf::ko_signs(d);
    *eps = ks.eps;
    *eps_prime = ks.eps_prime;
    *eps_dprime = ks.has_dprime ? ks.eps_dprime : 0;
    return NCAF_OK;
  });
}

int ncaf_run_scenario_file(const char* path, const char* outdir, long long seed, int threads,
                           int no_warm, char* errbuf, size_t errcap) {
  if (errbuf != nullptr && errcap > 0) errbuf[0] = '\0';
  if (path == nullptr) {
    set_error("path is null");
    return ncaf::kExitInvalid;
  }
  ncaf::RunOverrides ov;
  if (seed >= 0) ov.seed = static_cast<uint64_t>(seed);
  if (outdir != nullptr && outdir[0] != '\0') ov.out = outdir;
  if (threads > 0) ov.threads = threads;
  ov.no_warm_start = (no_warm != 0);
  std::string err;
  const int code = ncaf::run_scenario_file(path, ov, &err);
  if (code != ncaf::kExitOk) {
    set_error(err);
    if (errbuf != nullptr && errcap > 0) {
      const size_t n = err.size() < errcap - 1 ? err.size() : errcap - 1;
      std::memcpy(errbuf, err.data(), n);
      errbuf[n] = '\0';
    }
  }
  return code;
}

}  // extern "C"
