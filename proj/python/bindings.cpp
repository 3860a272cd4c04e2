#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "mnpcomm/channel.hpp"
#include "mnpcomm/error.hpp"
#include "mnpcomm/estimation.hpp"
#include "mnpcomm/hydrodynamics.hpp"
#include "mnpcomm/io.hpp"
#include "mnpcomm/modem.hpp"
#include "mnpcomm/oracle.hpp"

namespace py = pybind11;
using namespace mnpcomm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SusceptibilityTrace make_trace(const Array& times, const Array& values) {
  return {to_vector(times), to_vector(values)};
}

py::tuple trace_tuple(const SusceptibilityTrace& trace) {
  return py::make_tuple(to_array(trace.times()), to_array(trace.values()));
}

// Applies f to a scalar or elementwise to an array-like of times.
template <class F>
py::object map_times(const py::object& t, F&& f) {
  if (py::isinstance<py::float_>(t) || py::isinstance<py::int_>(t)) {
    return py::float_(f(t.cast<double>()));
  }
  const auto in = t.cast<Array>();
  Array out(in.request().shape);
  const double* src = in.data();
  double* dst = out.mutable_data();
  for (py::ssize_t i = 0; i < in.size(); ++i) dst[i] = f(src[i]);
  return std::move(out);
}

BitSequence to_bits(const py::object& bits) {
  if (py::isinstance<py::str>(bits)) return BitSequence::parse(bits.cast<std::string>());
  return BitSequence(bits.cast<std::vector<std::uint8_t>>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Duct-flow magnetic nanoparticle link";

  static py::handle error =
      py::exception<Error>(m, "Error", PyExc_ValueError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error,
                    (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<SystemParameters>(m, "SystemParameters")
      .def(py::init<>())
      .def_readwrite("tube_radius", &SystemParameters::tube_radius)
      .def_readwrite("injection_tube_radius", &SystemParameters::injection_tube_radius)
      .def_readwrite("receiver_radius", &SystemParameters::receiver_radius)
      .def_readwrite("receiver_length", &SystemParameters::receiver_length)
      .def_readwrite("propagation_distance", &SystemParameters::propagation_distance)
      .def_readwrite("background_flow_rate", &SystemParameters::background_flow_rate)
      .def_readwrite("injection_flow_rate", &SystemParameters::injection_flow_rate)
      .def_readwrite("injection_volume", &SystemParameters::injection_volume)
      .def_readwrite("symbol_duration", &SystemParameters::symbol_duration)
      .def_readwrite("reference_susceptibility",
                     &SystemParameters::reference_susceptibility)
      .def_readwrite("kinematic_viscosity", &SystemParameters::kinematic_viscosity)
      .def_readwrite("diffusion_coefficient", &SystemParameters::diffusion_coefficient)
      .def_readwrite("baseline_susceptibility",
                     &SystemParameters::baseline_susceptibility)
      .def("validate", [](const SystemParameters& p) { validate_parameters(p); })
      .def("__eq__", [](const SystemParameters& a, const SystemParameters& b) {
        return a == b;
      })
      .def("__repr__", [](const SystemParameters& p) { return format_parameters(p); });

  m.def("table1_parameters", &table1_parameters, "laboratory defaults, SI units");
  m.def("parse_parameters", &parse_parameters, py::arg("text"));
  m.def("format_parameters", &format_parameters, py::arg("params"));

  m.def("effective_velocity", &effective_velocity, py::arg("params"));
  m.def("center_velocity",
        py::overload_cast<const SystemParameters&>(&center_velocity),
        py::arg("params"));
  m.def("reynolds_number", [](const SystemParameters& p) {
    const auto r = reynolds_number(p);
    return py::make_tuple(r.value, r.laminar);
  }, py::arg("params"), "(value, laminar)");
  m.def("peclet_number", [](const SystemParameters& p) {
    const auto r = peclet_number(p);
    return py::make_tuple(r.value, r.length_ratio, r.flow_dominated);
  }, py::arg("params"), "(value, d/a, flow_dominated)");

  py::class_<SystemResponse>(m, "SystemResponse")
      .def(py::init([](double beta, double d, double cz, double v0) {
             return SystemResponse(ShapeParameter(beta), d, cz, v0);
           }),
           py::arg("beta"), py::arg("distance"), py::arg("receiver_length"),
           py::arg("center_velocity"))
      .def_static("from_parameters", [](double beta, const SystemParameters& p) {
        return SystemResponse::from_parameters(ShapeParameter(beta), p);
      }, py::arg("beta"), py::arg("params"))
      .def_property_readonly("beta", &SystemResponse::beta)
      .def_property_readonly("arrival_time", &SystemResponse::arrival_time)
      .def_property_readonly("peak_time", &SystemResponse::peak_time)
      .def("__call__", [](const SystemResponse& r, const py::object& t) {
        return map_times(t, [&](double x) { return system_response(x, r); });
      }, py::arg("t"))
      .def("peak", [](const SystemResponse& r) {
        const auto pk = peak(r);
        return py::make_tuple(pk.time, pk.value);
      })
      .def("tail_time", [](const SystemResponse& r, double f) {
        return tail_time(r, f);
      }, py::arg("fraction"));

  m.def("susceptibility",
        [](const py::object& t, const SystemResponse& r,
           const SystemParameters& p, double scale) {
          return map_times(t, [&](double x) {
            return susceptibility(x, r, p, scale);
          });
        },
        py::arg("t"), py::arg("response"), py::arg("params"),
        py::arg("amplitude_scale") = 1.0);

  m.def("oracle", [](double beta, const SystemParameters& p,
                     std::int64_t particles, std::uint64_t seed,
                     std::optional<std::vector<double>> times) {
    const auto resp = SystemResponse::from_parameters(ShapeParameter(beta), p);
    OracleConfig cfg;
    cfg.particle_count = particles;
    cfg.rng_seed = seed;
    cfg.time_points = times ? *times : default_oracle_times(resp);
    OracleReport report;
    {
      py::gil_scoped_release release;
      report = run_oracle(resp, cfg);
    }
    py::list rows;
    for (const auto& pt : report.points) {
      py::dict row;
      row["time"] = pt.time;
      row["analytic"] = pt.analytic;
      row["monte_carlo"] = pt.monte_carlo;
      row["tolerance"] = pt.tolerance;
      row["pass"] = pt.pass;
      rows.append(row);
    }
    return rows;
  }, py::arg("beta"), py::arg("params"), py::arg("particles") = 1'000'000,
     py::arg("seed"), py::arg("times") = std::nullopt);

  m.def("encode_text", [](const std::string& text) {
    return encode_text(text).to_string();
  }, py::arg("text"));
  m.def("decode_bits", [](const py::object& bits) {
    return decode_bits(to_bits(bits));
  }, py::arg("bits"));

  m.def("synthesize", [](const py::object& bits, const SystemParameters& p,
                         double beta, double noise_sigma, double jitter_sigma,
                         std::uint64_t seed, double sample_rate,
                         double amplitude_scale) {
    const NoiseModel noise{noise_sigma, jitter_sigma, seed};
    return trace_tuple(synthesize_trace(to_bits(bits), p, ShapeParameter(beta),
                                        noise, {sample_rate, amplitude_scale}));
  }, py::arg("bits"), py::arg("params"), py::arg("beta"),
     py::arg("noise_sigma") = 0.0, py::arg("jitter_sigma") = 0.0,
     py::arg("seed") = 0, py::arg("sample_rate") = 50.0,
     py::arg("amplitude_scale") = 1.0, "returns (times, chi)");

  m.def("min_pulse_peak", [](const py::object& bits, const SystemParameters& p,
                             double beta) {
    return min_pulse_peak(to_bits(bits), p, ShapeParameter(beta), {});
  }, py::arg("bits"), py::arg("params"), py::arg("beta"));

  m.def("decode", [](const Array& times, const Array& values, double threshold,
                     double symbol_duration, const std::string& sync) {
    DetectionConfig cfg;
    cfg.threshold = threshold;
    cfg.symbol_duration = symbol_duration;
    if (sync == "first-peak") {
      cfg.sync_policy = SyncPolicy::kFirstPeak;
    } else if (sync != "folded") {
      throw Error(ErrorCode::kInvalidArgument, "sync must be first-peak or folded");
    }
    const auto msg = decode_trace(make_trace(times, values), cfg);
    py::dict out;
    out["text"] = msg.text;
    out["bits"] = msg.bits.to_string();
    out["sync_times"] = msg.sync_times;
    out["margins"] = msg.per_bit_margins;
    return out;
  }, py::arg("times"), py::arg("values"), py::arg("threshold"),
     py::arg("symbol_duration") = 4.0, py::arg("sync") = "folded");

  m.def("fit_beta", [](const Array& times, const Array& values,
                       const SystemParameters& p, bool free_amplitude,
                       double beta_max,
                       std::optional<std::pair<double, double>> window) {
    FitOptions opts;
    opts.free_amplitude = free_amplitude;
    opts.beta_max = beta_max;
    opts.window = window;
    const auto r = fit_beta(make_trace(times, values), p, opts);
    py::dict out;
    out["beta_hat"] = r.beta_hat;
    out["time_shift"] = r.time_shift;
    out["amplitude_scale"] = r.amplitude_scale;
    out["residual_sse"] = r.residual_sse;
    out["iterations"] = r.iterations;
    out["converged"] = r.converged;
    return out;
  }, py::arg("times"), py::arg("values"), py::arg("params"),
     py::arg("free_amplitude") = false, py::arg("beta_max") = 50.0,
     py::arg("window") = std::nullopt);
}
