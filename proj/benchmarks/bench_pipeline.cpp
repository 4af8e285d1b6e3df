#include <benchmark/benchmark.h>

#include "eitshape/bem.hpp"
#include "eitshape/marching_cubes.hpp"
#include "eitshape/metrics.hpp"
#include "eitshape/shape_gradient.hpp"

namespace {

using eitshape::LatentShapeModel;
using eitshape::Vec3;

eitshape::LatentCode bumpy_shape(const LatentShapeModel& model) {
    eitshape::Vector v = model.sphere(Vec3(0.05, -0.03, 0.02), 0.5).values();
    v[model.harmonic_slot(2, 0)] = 0.15;
    v[model.harmonic_slot(3, -2)] = 0.10;
    return eitshape::LatentCode(v);
}

void BM_ExtractMesh(benchmark::State& state) {
    const LatentShapeModel model;
    const auto z = bumpy_shape(model);
    const double spacing = 0.01 * static_cast<double>(state.range(0));
    std::size_t panels = 0;
    for (auto _ : state) {
        const auto mesh = eitshape::extract_mesh(model, z, spacing);
        panels = mesh.panel_count();
        benchmark::DoNotOptimize(panels);
    }
    state.counters["panels"] = static_cast<double>(panels);
}
BENCHMARK(BM_ExtractMesh)->Arg(12)->Arg(8)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_AssembleAndFactor(benchmark::State& state) {
    const auto gamma = eitshape::make_sphere_mesh(0.5, static_cast<int>(state.range(0))).flipped();
    const auto sigma = eitshape::make_sphere_mesh(1.5, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        const eitshape::BieSystem system(gamma, sigma);
        benchmark::DoNotOptimize(&system);
    }
    state.counters["unknowns"] = static_cast<double>(gamma.panel_count() + sigma.panel_count());
}
BENCHMARK(BM_AssembleAndFactor)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ForwardAndAdjointSolve(benchmark::State& state) {
    const auto gamma = eitshape::make_sphere_mesh(0.5, 3).flipped();
    const auto sigma = eitshape::make_sphere_mesh(1.5, 3);
    const eitshape::BieSystem system(gamma, sigma);
    const auto patterns = eitshape::pattern_set(sigma, "yl12");
    for (auto _ : state) {
        for (const auto& g : patterns) {
            const auto u = eitshape::solve_forward(system, g);
            const auto w = eitshape::solve_adjoint(system, u.trace_on_sigma);
            benchmark::DoNotOptimize(w.flux_on_gamma.data());
        }
    }
}
BENCHMARK(BM_ForwardAndAdjointSolve)->Unit(benchmark::kMillisecond);

void BM_HausdorffDistance(benchmark::State& state) {
    const auto a = eitshape::make_sphere_mesh(0.5, static_cast<int>(state.range(0)));
    const auto b = eitshape::make_sphere_mesh(0.6, static_cast<int>(state.range(0)), Vec3(0.02, 0, 0));
    for (auto _ : state) benchmark::DoNotOptimize(eitshape::hausdorff_distance(a, b));
}
BENCHMARK(BM_HausdorffDistance)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
