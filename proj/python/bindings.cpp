#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "anderson/errors.hpp"
#include "anderson/harness.hpp"
#include "anderson/model.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectrum.hpp"
#include "anderson/stats.hpp"
#include "anderson/transfer.hpp"

namespace py = pybind11;
using namespace anderson;

namespace {

model::PotentialRealization potential_from(const std::vector<int>& values) {
    model::PotentialRealization pot;
    for (int v : values) {
        if (v != 1 && v != -1) throw InvalidArgument("potential entries must be +1 or -1");
        pot.values.push_back(static_cast<std::int8_t>(v));
    }
    return pot;
}

model::TridiagonalHamiltonian hamiltonian_from(const std::vector<int>& values, double lambda) {
    return model::build_hamiltonian(potential_from(values), lambda);
}

}  // namespace

PYBIND11_MODULE(_anderson_spectra, m) {
    m.doc() = "Spectral statistics of the 1D Anderson-Bernoulli model";
    m.attr("__version__") = std::string(harness::version());

    static py::exception<Error> base(m, "Error");
    static py::exception<InvalidArgument> invalid(m, "InvalidArgument", base.ptr());
    static py::exception<NumericalFailure> numeric(m, "NumericalFailure", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InvalidArgument& e) {
            invalid(e.what());
        } catch (const NumericalFailure& e) {
            numeric(e.what());
        } catch (const Error& e) {
            base(e.what());
        }
    });

    m.def("seed_for_trial", &seed_for_trial, py::arg("base_seed"), py::arg("trial"));

    m.def(
        "sample_potential",
        [](std::size_t n, std::uint64_t seed) {
            const auto pot = model::sample_potential(n, seed);
            return std::vector<int>(pot.values.begin(), pot.values.end());
        },
        py::arg("n"), py::arg("seed"), "n i.i.d. fair signs from the stream keyed by seed.");

    m.def(
        "validate_coupling",
        [](double lambda, std::vector<std::int64_t> poly, double c, double lambda0) {
            const auto r = model::validate_coupling({lambda, std::move(poly), c, lambda0});
            py::dict d;
            d["small_coupling"] = r.small_coupling;
            d["algebraic_bounds"] = r.algebraic_bounds;
            d["large_conjugate"] = r.large_conjugate;
            d["degree"] = r.degree;
            d["conjugates"] = r.conjugates;
            d["conjugate_moduli"] = r.conjugate_moduli;
            return d;
        },
        py::arg("lambda_"), py::arg("poly"), py::arg("C"), py::arg("lambda0"));

    m.def(
        "sturm_count",
        [](const std::vector<int>& v, double lambda, double energy) {
            return spectrum::sturm_count(hamiltonian_from(v, lambda), energy);
        },
        py::arg("potential"), py::arg("lambda_"), py::arg("energy"));

    m.def(
        "eigenvalues",
        [](const std::vector<int>& v, double lambda, double lower, double upper) {
            return spectrum::eigen_window(hamiltonian_from(v, lambda), lower, upper, false).eigenvalues;
        },
        py::arg("potential"), py::arg("lambda_"), py::arg("lower"), py::arg("upper"),
        "Eigenvalues of H_N in [lower, upper).");

    m.def(
        "log_norm",
        [](const std::vector<int>& v, double lambda, double energy) {
            return transfer::transfer_product(energy, potential_from(v), lambda).log_norm();
        },
        py::arg("potential"), py::arg("lambda_"), py::arg("energy"), "log ||M_N(E)||.");

    m.def(
        "lyapunov_exponent",
        [](double energy, double lambda, std::size_t n, std::size_t trials, std::uint64_t seed) {
            const auto l = transfer::lyapunov_exponent(energy, lambda, n, trials, seed);
            return py::make_tuple(l.value, l.std_error);
        },
        py::arg("energy"), py::arg("lambda_"), py::arg("n"), py::arg("trials"), py::arg("seed") = 0);

    m.def(
        "run_experiment",
        [](const std::string& experiment, const std::string& config_json, unsigned threads) {
            const auto d = harness::parse_descriptor(experiment, harness::Json::parse(config_json));
            harness::RunOutput out;
            {
                py::gil_scoped_release release;
                harness::execute(d, WorkerPool(threads), out);
            }
            harness::Json j{{"experiment", d.experiment}, {"config", d.config}, {"results", out.results}};
            return py::make_tuple(j.dump(), out.table.to_csv());
        },
        py::arg("experiment"), py::arg("config_json"), py::arg("threads") = 1,
        "Runs an experiment in memory; returns (summary JSON, CSV text).");
}
