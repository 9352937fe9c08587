// Serial vs OpenMP element kernels on 2D meshes of growing size.

#include <benchmark/benchmark.h>

#include <random>

#include "dpvi/kernels.hpp"
#include "dpvi/operator.hpp"

using namespace dpvi;

namespace {

struct Fixture {
  MeshPtr mesh;
  ExponentData ed;
  Eigen::VectorXd u;
};

Fixture make(int n) {
  MeshSpec spec;
  spec.dim = 2;
  spec.subdivisions = n;
  Fixture f{build_mesh(spec), {}, {}};
  f.ed = ExponentData::sample(f.mesh, parse_expression("1.6 + 0.2*x", {"x", "y"}),
                              parse_expression("2.5 + 0.3*y", {"x", "y"}),
                              parse_expression("1 + sin(3*x)", {"x", "y"}));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  f.u.resize(static_cast<Eigen::Index>(f.mesh->num_nodes()));
  for (Eigen::Index i = 0; i < f.u.size(); ++i) f.u[i] = d(rng);
  return f;
}

void BM_Flux(benchmark::State& st, kernels::Exec exec) {
  const Fixture f = make(static_cast<int>(st.range(0)));
  std::vector<double> out(f.mesh->num_elements() * kernels::kVec);
  for (auto _ : st) {
    kernels::element_flux(*f.mesh, f.ed, f.u, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() *
                       static_cast<int64_t>(f.mesh->num_elements()));
}

void BM_Jacobian(benchmark::State& st, kernels::Exec exec) {
  const Fixture f = make(static_cast<int>(st.range(0)));
  std::vector<double> out(f.mesh->num_elements() * kernels::kMat);
  for (auto _ : st) {
    kernels::element_jacobian(*f.mesh, f.ed, f.u, 1e-8, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() *
                       static_cast<int64_t>(f.mesh->num_elements()));
}

void BM_Apply(benchmark::State& st, kernels::Exec exec) {
  const Fixture f = make(static_cast<int>(st.range(0)));
  const DoublePhaseOperator op(f.ed, 1e-8, exec);
  const FeFunction u(f.mesh, f.u);
  for (auto _ : st) benchmark::DoNotOptimize(op.apply(u));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Flux, serial, kernels::Exec::serial)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_Flux, parallel, kernels::Exec::parallel)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_Jacobian, serial, kernels::Exec::serial)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_Jacobian, parallel, kernels::Exec::parallel)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(BM_Apply, serial, kernels::Exec::serial)->Arg(128);
BENCHMARK_CAPTURE(BM_Apply, parallel, kernels::Exec::parallel)->Arg(128);

BENCHMARK_MAIN();
