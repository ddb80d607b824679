// Copyright 2026 The qcavity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcavity/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include <openssl/evp.h>

#include "json.hpp"
#include "qcavity/errors.hpp"

namespace qcavity {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

//
// Strict reading helpers. Every accessor takes the dotted path of the value
// it reads so errors can name it.
//

std::string join(const std::string& parent, const std::string& key)
{
    return parent.empty() ? key : parent + "." + key;
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys)
{
    if (!obj.is_object()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known = std::any_of(keys.begin(), keys.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known) {
            throw ConfigError(join(path, it.key()), "unknown key");
        }
    }
}

double read_number(const json& v, const std::string& path)
{
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(path, "must be finite");
    }
    return x;
}

std::int64_t read_integer(const json& v, const std::string& path)
{
    if (!v.is_number_integer()) {
        throw ConfigError(path, "expected an integer");
    }
    return v.get<std::int64_t>();
}

std::string read_string(const json& v, const std::string& path)
{
    if (!v.is_string()) {
        throw ConfigError(path, "expected a string");
    }
    return v.get<std::string>();
}

bool read_bool(const json& v, const std::string& path)
{
    if (!v.is_boolean()) {
        throw ConfigError(path, "expected true or false");
    }
    return v.get<bool>();
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void require(bool ok, const std::string& path, const std::string& reason)
{
    if (!ok) {
        throw ConfigError(path, reason);
    }
}

const char* task_block(Task task)
{
    switch (task) {
    case Task::Simulate:
        return "simulate";
    case Task::Gate:
        return "gate";
    case Task::Scan:
        return "scan";
    case Task::Berry:
        return "loop";
    case Task::Dump:
        return nullptr;
    }
    return nullptr;
}

std::vector<Level> model_levels(Model m)
{
    return m == Model::Geometric ? std::vector<Level>{0, 1, 2, 3} : std::vector<Level>{0, 1, 3};
}

//
// JSON text output with 17-digit doubles.
//

void write_json(const ojson& v, std::string& out, int indent)
{
    const std::string pad(std::size_t(indent + 2), ' ');
    switch (v.type()) {
    case ojson::value_t::null:
        out += "null";
        return;
    case ojson::value_t::boolean:
        out += v.get<bool>() ? "true" : "false";
        return;
    case ojson::value_t::number_integer:
        out += std::to_string(v.get<std::int64_t>());
        return;
    case ojson::value_t::number_unsigned:
        out += std::to_string(v.get<std::uint64_t>());
        return;
    case ojson::value_t::number_float: {
        const double x = v.get<double>();
        out += std::isfinite(x) ? fmt(x) : "null";
        return;
    }
    case ojson::value_t::string:
        out += v.dump();
        return;
    case ojson::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        const bool flat = std::all_of(v.begin(), v.end(), [](const ojson& e) {
            return e.is_primitive() || (e.is_array() && std::all_of(e.begin(), e.end(), [](const ojson& x) {
                                            return x.is_primitive();
                                        }));
        }) && std::none_of(v.begin(), v.end(), [](const ojson& e) { return e.is_array(); });
        if (flat) {
            out += '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) {
                    out += ", ";
                }
                write_json(v[i], out, indent);
            }
            out += ']';
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            out += pad;
            write_json(v[i], out, indent + 2);
            out += i + 1 < v.size() ? ",\n" : "\n";
        }
        out += std::string(std::size_t(indent), ' ') + ']';
        return;
    }
    case ojson::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        std::size_t i = 0;
        for (auto it = v.begin(); it != v.end(); ++it, ++i) {
            out += pad + ojson(it.key()).dump() + ": ";
            write_json(it.value(), out, indent + 2);
            out += i + 1 < v.size() ? ",\n" : "\n";
        }
        out += std::string(std::size_t(indent), ' ') + '}';
        return;
    }
    default:
        throw InvalidArgument("unsupported JSON value");
    }
}

std::string json_text(const ojson& v)
{
    std::string out;
    write_json(v, out, 0);
    out += '\n';
    return out;
}

ojson complex_pair(Complex z) { return ojson::array({z.real(), z.imag()}); }

ojson params_json(const SystemParams& p)
{
    ojson o;
    o["omega0"] = p.omega0;
    o["omega3"] = p.omega3;
    o["omega_c"] = p.omega_c;
    o["g"] = p.g;
    o["Omega"] = p.Omega;
    o["kappa"] = p.kappa;
    o["tau"] = p.tau;
    return o;
}

std::string label_name(const ProductLabel& l)
{
    return std::to_string(l.ion1) + std::to_string(l.ion2);
}

//
// Output files.
//

void write_atomic(const std::filesystem::path& dir, const std::string& name,
                  const std::string& contents)
{
    const std::filesystem::path target = dir / name;
    const std::filesystem::path tmp = dir / ("." + name + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        f.write(contents.data(), std::streamsize(contents.size()));
        f.flush();
        if (!f) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + target.string());
    }
}

StepControl step_control(const IntegratorConfig& ic)
{
    StepControl c;
    c.dt = ic.dt;
    c.trace_tolerance = ic.trace_tolerance;
    c.richardson_check = ic.richardson_check;
    return c;
}

StateVector initial_state(const InitialConfig& ic, const HilbertSpec& spec)
{
    if (ic.preset == "computational") {
        std::vector<std::pair<ProductLabel, Complex>> terms;
        for (const ProductLabel& l : kComputationalBasis) {
            terms.push_back({l, 1.0});
        }
        return superposition(terms, spec);
    }
    if (ic.preset == "phi+") {
        return phi_state(+1, spec);
    }
    if (ic.preset == "phi-") {
        return phi_state(-1, spec);
    }
    return basis_state({ic.ion1, ic.ion2, ic.photons}, spec);
}

struct TaskFiles {
    std::vector<std::pair<std::string, std::string>> files;
    std::string summary;
};

TaskFiles run_dump(const ScenarioConfig& c)
{
    const ModelInstance inst = build_model(c.model, c.params, c.fock_cutoff);
    TaskFiles out;
    std::string basis = "index,ion1,ion2,photons\n";
    for (std::size_t i = 0; i < inst.spec.dim(); ++i) {
        const ProductLabel l = inst.spec.label(i);
        basis += std::to_string(i) + "," + std::to_string(l.ion1) + "," + std::to_string(l.ion2)
                 + "," + std::to_string(l.photons) + "\n";
    }
    std::string jumps;
    for (const JumpOperator& j : inst.jumps) {
        jumps += "# " + j.label + "\n" + dump_operator(j.op);
    }
    out.files.push_back({"hamiltonian.txt", dump_operator(inst.hamiltonian)});
    out.files.push_back({"jumps.txt", jumps});
    out.files.push_back({"basis.csv", basis});
    out.summary = "dump: " + std::string(to_string(c.model)) + " Hamiltonian, dimension "
                  + std::to_string(inst.spec.dim()) + ", " + std::to_string(inst.jumps.size())
                  + " jump operator(s)";
    return out;
}

TaskFiles run_simulate(const ScenarioConfig& c)
{
    const ModelInstance inst = build_model(c.model, c.params, c.fock_cutoff);
    const Generator gen = Generator::constant(inst.hamiltonian, inst.jumps);
    StepControl ctrl = step_control(c.integrator);
    const std::size_t steps = planned_steps(gen, c.simulate.t_final, ctrl);
    ctrl.record_every = std::max<std::size_t>(1, steps / c.simulate.samples);
    const StateVector psi0 = initial_state(c.initial, inst.spec);

    const HilbertSpec ions = inst.spec.without_cavity();
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < ions.dim(); ++i) {
        labels.push_back("P" + label_name(ions.label(i)));
    }
    if (inst.spec.has_cavity()) {
        labels.push_back("n");
    }
    labels.push_back("purity");
    const Matrix number = inst.spec.has_cavity() ? photon_number(inst.spec).matrix() : Matrix();

    auto observe = [&](const Matrix& rho) {
        std::vector<double> row;
        const Matrix reduced = trace_out_cavity(rho, inst.spec);
        for (Eigen::Index i = 0; i < reduced.rows(); ++i) {
            row.push_back(reduced(i, i).real());
        }
        if (inst.spec.has_cavity()) {
            row.push_back((number * rho).trace().real());
        }
        row.push_back(rho.cwiseAbs2().sum());
        return row;
    };

    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    TrajectoryMeta meta;
    const bool master = !inst.jumps.empty();
    if (master) {
        const MasterTrajectory traj = evolve_master(DensityMatrix::pure(psi0), gen,
                                                    c.simulate.t_final, ctrl);
        times = traj.times;
        for (const DensityMatrix& rho : traj.states) {
            rows.push_back(observe(rho.matrix()));
        }
        meta = traj.meta;
    } else {
        const PureTrajectory traj = evolve_schrodinger(psi0, gen, c.simulate.t_final, ctrl);
        times = traj.times;
        for (const StateVector& psi : traj.states) {
            rows.push_back(observe(psi.amplitudes() * psi.amplitudes().adjoint()));
        }
        meta = traj.meta;
    }

    ojson s;
    s["model"] = std::string(to_string(c.model));
    s["method"] = master ? "master" : "schrodinger";
    s["t_final"] = c.simulate.t_final;
    s["dt"] = meta.dt;
    s["steps"] = meta.steps;
    s["record_every"] = meta.record_every;
    s["frames"] = times.size();
    s["max_trace_drift"] = meta.max_trace_drift;
    s["max_hermiticity_drift"] = meta.max_hermiticity_drift;
    if (master) {
        s["min_eigenvalue"] = meta.min_eigenvalue;
    } else {
        s["min_eigenvalue"] = nullptr;
    }
    if (meta.richardson_delta) {
        s["richardson_delta"] = *meta.richardson_delta;
    } else {
        s["richardson_delta"] = nullptr;
    }

    TaskFiles out;
    out.files.push_back({"trajectory.csv", trajectory_csv(labels, times, rows)});
    out.files.push_back({"simulate.json", json_text(s)});
    out.summary = "simulate: " + std::to_string(meta.steps) + " steps, "
                  + std::to_string(times.size()) + " frames, max trace drift "
                  + fmt(meta.max_trace_drift);
    return out;
}

TaskFiles run_gate(const ScenarioConfig& c, std::size_t workers)
{
    GateOptions opt;
    opt.ctrl = step_control(c.integrator);
    opt.fock_cutoff = c.fock_cutoff;
    opt.workers = workers;
    const GateReport rep = extract_gate(c.model, c.params, c.gate.t_gate, opt);
    TaskFiles out;
    out.files.push_back({"gate.json", gate_report_json(rep)});
    out.summary = "gate: fidelity " + fmt(rep.fidelity) + ", phase_10 " + fmt(rep.phase_10);
    return out;
}

TaskFiles run_scan(const ScenarioConfig& c, std::size_t workers)
{
    ScanOptions opt;
    opt.gate.ctrl = step_control(c.integrator);
    opt.gate.fock_cutoff = c.fock_cutoff;
    opt.gate.workers = workers;
    opt.omega_ratio = c.scan.omega_ratio;
    opt.t_gate = c.scan.t_gate;
    const std::vector<ScanRow> rows = regime_scan(c.scan.axis, c.scan.values, c.params, c.model, opt);
    const auto failed = std::count_if(rows.begin(), rows.end(), [](const ScanRow& r) { return !r.ok; });
    TaskFiles out;
    out.files.push_back({"scan.csv", scan_csv(rows)});
    out.summary = "scan: " + std::to_string(rows.size()) + " point(s) over "
                  + std::string(to_string(c.scan.axis)) + ", " + std::to_string(failed)
                  + " failed";
    return out;
}

TaskFiles run_berry(const ScenarioConfig& c, std::size_t workers)
{
    const LoopPath path = standard_loop(c.loop.theta0, c.loop.T, c.loop.ramp_fraction,
                                       c.loop.windings);
    const BerryReport rep = adiabatic_run(path, c.loop.Omega_bar, step_control(c.integrator),
                                          workers);
    TaskFiles out;
    out.files.push_back({"berry.json", berry_report_json(rep)});
    out.summary = "berry: numeric_phase " + fmt(rep.numeric_phase) + ", surface_integral "
                  + fmt(rep.surface_integral);
    if (!rep.warning.empty()) {
        out.summary += "\nwarning: " + rep.warning;
    }
    return out;
}

} // namespace

std::string_view to_string(Task task)
{
    switch (task) {
    case Task::Dump:
        return "dump";
    case Task::Simulate:
        return "simulate";
    case Task::Gate:
        return "gate";
    case Task::Scan:
        return "scan";
    case Task::Berry:
        return "berry";
    }
    return "?";
}

Task parse_task(std::string_view name)
{
    for (Task t : {Task::Dump, Task::Simulate, Task::Gate, Task::Scan, Task::Berry}) {
        if (to_string(t) == name) {
            return t;
        }
    }
    throw InvalidArgument("unknown task '" + std::string(name)
                          + "' (expected dump, simulate, gate, scan or berry)");
}

ScenarioConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    allow_keys(doc, "", {"model", "task", "params", "spec", "initial", "simulate", "gate",
                         "scan", "loop", "integrator", "output", "seed"});

    ScenarioConfig c;
    require(doc.contains("model"), "model", "required");
    require(doc.contains("task"), "task", "required");
    try {
        c.model = parse_model(read_string(doc["model"], "model"));
    } catch (const InvalidArgument& e) {
        throw ConfigError("model", e.what());
    }
    try {
        c.task = parse_task(read_string(doc["task"], "task"));
    } catch (const InvalidArgument& e) {
        throw ConfigError("task", e.what());
    }

    // Task blocks belong to exactly one task.
    for (const char* block : {"simulate", "gate", "scan", "loop", "initial"}) {
        if (!doc.contains(block)) {
            continue;
        }
        const char* own = task_block(c.task);
        const bool belongs = (own && std::string(own) == block)
                             || (c.task == Task::Simulate && std::string(block) == "initial");
        require(belongs, block, "not valid for task " + std::string(to_string(c.task)));
    }
    if (c.model == Model::Geometric) {
        require(c.task == Task::Dump || c.task == Task::Berry, "model",
                "geometric supports tasks dump and berry");
    }
    if (c.task == Task::Berry) {
        require(c.model == Model::Geometric, "task", "berry needs model geometric");
    }

    if (doc.contains("params")) {
        const json& p = doc["params"];
        allow_keys(p, "params", {"omega0", "omega3", "omega_c", "Delta", "g", "Omega", "kappa", "tau"});
        const bool omegas = p.contains("omega0") || p.contains("omega3") || p.contains("omega_c");
        if (p.contains("Delta")) {
            require(!omegas, "params.Delta",
                    "derived, not settable alongside omega0, omega3 or omega_c");
            c.params.omega_c = read_number(p["Delta"], "params.Delta");
        }
        if (p.contains("omega0")) {
            c.params.omega0 = read_number(p["omega0"], "params.omega0");
        }
        if (p.contains("omega3")) {
            c.params.omega3 = read_number(p["omega3"], "params.omega3");
        }
        if (p.contains("omega_c")) {
            c.params.omega_c = read_number(p["omega_c"], "params.omega_c");
        }
        if (p.contains("g")) {
            c.params.g = read_number(p["g"], "params.g");
            require(c.params.g > 0.0, "params.g", "must be > 0");
        }
        for (auto [key, field] : {std::pair{"Omega", &SystemParams::Omega},
                                  std::pair{"kappa", &SystemParams::kappa},
                                  std::pair{"tau", &SystemParams::tau}}) {
            if (p.contains(key)) {
                const std::string path = std::string("params.") + key;
                c.params.*field = read_number(p[key], path);
                require(c.params.*field >= 0.0, path, "must be >= 0");
            }
        }
    }

    if (doc.contains("spec")) {
        allow_keys(doc["spec"], "spec", {"fock_cutoff"});
        if (doc["spec"].contains("fock_cutoff")) {
            const auto n = read_integer(doc["spec"]["fock_cutoff"], "spec.fock_cutoff");
            require(n >= 1 && n <= 100, "spec.fock_cutoff", "must lie in [1, 100]");
            c.fock_cutoff = int(n);
        }
    }

    if (doc.contains("integrator")) {
        const json& ic = doc["integrator"];
        allow_keys(ic, "integrator", {"dt", "trace_tolerance", "richardson_check"});
        if (ic.contains("dt")) {
            c.integrator.dt = read_number(ic["dt"], "integrator.dt");
            require(c.integrator.dt >= 0.0, "integrator.dt", "must be >= 0 (0 = automatic)");
        }
        if (ic.contains("trace_tolerance")) {
            c.integrator.trace_tolerance =
                read_number(ic["trace_tolerance"], "integrator.trace_tolerance");
            require(c.integrator.trace_tolerance > 0.0, "integrator.trace_tolerance",
                    "must be > 0");
        }
        if (ic.contains("richardson_check")) {
            c.integrator.richardson_check =
                read_bool(ic["richardson_check"], "integrator.richardson_check");
        }
    }

    if (doc.contains("output")) {
        c.output = read_string(doc["output"], "output");
        require(!c.output.empty(), "output", "must not be empty");
    }
    if (doc.contains("seed")) {
        c.seed = read_integer(doc["seed"], "seed");
    }

    if (c.task == Task::Simulate) {
        if (doc.contains("initial")) {
            const json& in = doc["initial"];
            allow_keys(in, "initial", {"preset", "ion1", "ion2", "photons"});
            if (in.contains("preset")) {
                require(!in.contains("ion1") && !in.contains("ion2") && !in.contains("photons"),
                        "initial.preset", "cannot be combined with ion1, ion2 or photons");
                c.initial.preset = read_string(in["preset"], "initial.preset");
                require(c.initial.preset == "computational" || c.initial.preset == "phi+"
                            || c.initial.preset == "phi-",
                        "initial.preset", "expected computational, phi+ or phi-");
            }
            const std::vector<Level> levels = model_levels(c.model);
            for (auto [key, field] : {std::pair{"ion1", &InitialConfig::ion1},
                                      std::pair{"ion2", &InitialConfig::ion2}}) {
                if (in.contains(key)) {
                    const std::string path = std::string("initial.") + key;
                    const auto l = read_integer(in[key], path);
                    require(std::find(levels.begin(), levels.end(), l) != levels.end(), path,
                            "level " + std::to_string(l) + " is not in the "
                                + std::string(to_string(c.model)) + " model");
                    c.initial.*field = Level(l);
                }
            }
            if (in.contains("photons")) {
                const auto n = read_integer(in["photons"], "initial.photons");
                const int cap = c.model == Model::Full ? c.fock_cutoff : 0;
                require(n >= 0 && n <= cap, "initial.photons",
                        std::to_string(n) + " outside [0, " + std::to_string(cap) + "]"
                            + (c.model == Model::Full ? " set by spec.fock_cutoff"
                                                      : " (model has no cavity)"));
                c.initial.photons = int(n);
            }
        }
        const json sim = doc.contains("simulate") ? doc["simulate"] : json::object();
        allow_keys(sim, "simulate", {"t_final", "samples"});
        if (sim.contains("t_final")) {
            c.simulate.t_final = read_number(sim["t_final"], "simulate.t_final");
            require(c.simulate.t_final > 0.0, "simulate.t_final", "must be > 0");
        } else {
            require(c.params.Omega > 0.0, "simulate.t_final",
                    "required when params.Omega is 0 (default is the gate time)");
            c.simulate.t_final = gate_time(c.params.Omega);
        }
        if (sim.contains("samples")) {
            const auto n = read_integer(sim["samples"], "simulate.samples");
            require(n >= 1 && n <= 1000000, "simulate.samples", "must lie in [1, 1e6]");
            c.simulate.samples = std::size_t(n);
        }
    }

    if (c.task == Task::Gate) {
        const json g = doc.contains("gate") ? doc["gate"] : json::object();
        allow_keys(g, "gate", {"t_gate"});
        if (g.contains("t_gate")) {
            c.gate.t_gate = read_number(g["t_gate"], "gate.t_gate");
            require(c.gate.t_gate > 0.0, "gate.t_gate", "must be > 0");
        } else {
            require(c.params.Omega > 0.0, "params.Omega", "must be > 0 to derive gate.t_gate");
            c.gate.t_gate = gate_time(c.params.Omega);
        }
    }

    if (c.task == Task::Scan) {
        require(doc.contains("scan"), "scan", "required for task scan");
        const json& s = doc["scan"];
        allow_keys(s, "scan", {"axis", "values", "omega_ratio", "t_gate"});
        require(s.contains("axis"), "scan.axis", "required");
        try {
            c.scan.axis = parse_scan_axis(read_string(s["axis"], "scan.axis"));
        } catch (const InvalidArgument& e) {
            throw ConfigError("scan.axis", e.what());
        }
        require(s.contains("values"), "scan.values", "required");
        require(s["values"].is_array(), "scan.values", "expected an array");
        require(!s["values"].empty(), "scan.values", "must not be empty");
        for (std::size_t i = 0; i < s["values"].size(); ++i) {
            const std::string path = "scan.values[" + std::to_string(i) + "]";
            const double v = c.scan.axis == ScanAxis::FockCutoff
                                 ? double(read_integer(s["values"][i], path))
                                 : read_number(s["values"][i], path);
            require(v > 0.0, path, "must be > 0");
            require(c.scan.values.empty() || v > c.scan.values.back(), path,
                    "values must be strictly increasing");
            c.scan.values.push_back(v);
        }
        if (c.scan.axis == ScanAxis::FockCutoff) {
            require(c.model == Model::Full, "scan.axis", "fock_cutoff needs model full");
            require(c.scan.values.back() <= 100, "scan.values", "fock_cutoff must be <= 100");
        }
        if (s.contains("omega_ratio")) {
            c.scan.omega_ratio = read_number(s["omega_ratio"], "scan.omega_ratio");
            require(*c.scan.omega_ratio > 0.0, "scan.omega_ratio", "must be > 0");
            require(c.scan.axis != ScanAxis::Omega, "scan.omega_ratio",
                    "cannot be combined with an Omega scan");
        }
        if (s.contains("t_gate")) {
            c.scan.t_gate = read_number(s["t_gate"], "scan.t_gate");
            require(*c.scan.t_gate > 0.0, "scan.t_gate", "must be > 0");
        } else if (!c.scan.omega_ratio && c.scan.axis != ScanAxis::Omega) {
            require(c.params.Omega > 0.0, "params.Omega",
                    "must be > 0 to derive the gate time (or set scan.omega_ratio)");
        }
    }

    if (c.task == Task::Berry && doc.contains("loop")) {
        const json& l = doc["loop"];
        allow_keys(l, "loop", {"theta0", "windings", "T", "ramp_fraction", "Omega_bar"});
        if (l.contains("theta0")) {
            c.loop.theta0 = read_number(l["theta0"], "loop.theta0");
            require(c.loop.theta0 > 0.0 && c.loop.theta0 < std::numbers::pi, "loop.theta0",
                    "must lie in (0, pi)");
        }
        if (l.contains("windings")) {
            c.loop.windings = read_number(l["windings"], "loop.windings");
            require(c.loop.windings != 0.0, "loop.windings", "must be nonzero");
        }
        if (l.contains("T")) {
            c.loop.T = read_number(l["T"], "loop.T");
            require(c.loop.T > 0.0, "loop.T", "must be > 0");
        }
        if (l.contains("ramp_fraction")) {
            c.loop.ramp_fraction = read_number(l["ramp_fraction"], "loop.ramp_fraction");
            require(c.loop.ramp_fraction > 0.0 && c.loop.ramp_fraction < 0.5,
                    "loop.ramp_fraction", "must lie in (0, 0.5)");
        }
        if (l.contains("Omega_bar")) {
            c.loop.Omega_bar = read_number(l["Omega_bar"], "loop.Omega_bar");
            require(c.loop.Omega_bar > 0.0, "loop.Omega_bar", "must be > 0");
        }
    }
    return c;
}

std::string canonical_config(const ScenarioConfig& c, bool include_output)
{
    ojson o;
    o["model"] = std::string(to_string(c.model));
    o["task"] = std::string(to_string(c.task));
    o["params"] = params_json(c.params);
    o["spec"] = {{"fock_cutoff", c.fock_cutoff}};
    switch (c.task) {
    case Task::Simulate:
        if (c.initial.preset.empty()) {
            o["initial"] = {{"ion1", c.initial.ion1},
                            {"ion2", c.initial.ion2},
                            {"photons", c.initial.photons}};
        } else {
            o["initial"] = {{"preset", c.initial.preset}};
        }
        o["simulate"] = {{"t_final", c.simulate.t_final}, {"samples", c.simulate.samples}};
        break;
    case Task::Gate:
        o["gate"] = {{"t_gate", c.gate.t_gate}};
        break;
    case Task::Scan: {
        ojson s;
        s["axis"] = std::string(to_string(c.scan.axis));
        ojson values = ojson::array();
        for (double v : c.scan.values) {
            if (c.scan.axis == ScanAxis::FockCutoff) {
                values.push_back(std::int64_t(v));
            } else {
                values.push_back(v);
            }
        }
        s["values"] = values;
        if (c.scan.omega_ratio) {
            s["omega_ratio"] = *c.scan.omega_ratio;
        }
        if (c.scan.t_gate) {
            s["t_gate"] = *c.scan.t_gate;
        }
        o["scan"] = s;
        break;
    }
    case Task::Berry:
        o["loop"] = {{"theta0", c.loop.theta0},
                     {"windings", c.loop.windings},
                     {"T", c.loop.T},
                     {"ramp_fraction", c.loop.ramp_fraction},
                     {"Omega_bar", c.loop.Omega_bar}};
        break;
    case Task::Dump:
        break;
    }
    o["integrator"] = {{"dt", c.integrator.dt},
                       {"trace_tolerance", c.integrator.trace_tolerance},
                       {"richardson_check", c.integrator.richardson_check}};
    if (include_output) {
        o["output"] = c.output;
    }
    o["seed"] = c.seed;
    return json_text(o);
}

std::string config_reference()
{
    return R"(qcavity scenario configuration (JSON, unknown keys rejected)

key                          type      default            notes
model                        string    required           full | eliminated | dispersive | reduced | geometric
task                         string    required           dump | simulate | gate | scan | berry
params.omega0                number    0                  frequency of level |0>
params.omega3                number    0                  frequency of level |3>
params.omega_c               number    0                  cavity frequency
params.Delta                 number    -                  shortcut: omega0 = omega3 = 0, omega_c = Delta;
                                                          not allowed together with omega0/omega3/omega_c
params.g                     number    1                  > 0, ion-cavity coupling
params.Omega                 number    0                  >= 0, laser Rabi amplitude on ion 1
params.kappa                 number    0                  >= 0, cavity field decay (photon loss 2 kappa)
params.tau                   number    0                  >= 0, emission rate per channel
spec.fock_cutoff             integer   2                  [1, 100], photon number cutoff (full model)
initial.preset               string    -                  simulate only: computational | phi+ | phi-
initial.ion1                 integer   1                  simulate only: level of ion 1
initial.ion2                 integer   0                  simulate only: level of ion 2
initial.photons              integer   0                  simulate only: [0, spec.fock_cutoff], 0 without cavity
simulate.t_final             number    pi sqrt2 / Omega   > 0
simulate.samples             integer   100                [1, 1e6], approximate number of recorded frames
gate.t_gate                  number    pi sqrt2 / Omega   > 0
scan.axis                    string    required           Delta | kappa | tau | Omega | fock_cutoff
scan.values                  array     required           non-empty, positive, strictly increasing;
                                                          integers for fock_cutoff (model full only)
scan.omega_ratio             number    -                  > 0, sets Omega = omega_ratio * g^2 / Delta per point
scan.t_gate                  number    pi sqrt2 / Omega   > 0, fixed gate time for every point
loop.theta0                  number    2 pi / 3           (0, pi), cap opening angle
loop.windings                number    1                  nonzero; negative sweeps phi backwards
loop.T                       number    2000               > 0, loop duration
loop.ramp_fraction           number    0.1                (0, 0.5), share of T per theta ramp
loop.Omega_bar               number    1                  > 0, drive magnitude
integrator.dt                number    0                  >= 0; 0 picks 0.05 / max(||H||, rates)
integrator.trace_tolerance   number    1e-06              > 0, abort threshold for |Tr rho - 1|
integrator.richardson_check  boolean   false              rerun at dt/2 and record the change
output                       string    "qcavity-out"      output directory (--out overrides)
seed                         integer   0                  reserved

Blocks initial/simulate, gate, scan and loop are only accepted for their own
task (loop belongs to berry). berry needs model geometric; geometric supports
dump and berry only.

Outputs: dump -> hamiltonian.txt, jumps.txt, basis.csv; simulate ->
trajectory.csv, simulate.json; gate -> gate.json; scan -> scan.csv;
berry -> berry.json. Every run also writes config.json and manifest.json.
Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 I/O error.
)";
}

std::string gate_report_json(const GateReport& r)
{
    ojson o;
    o["model"] = std::string(to_string(r.model));
    o["params"] = params_json(r.params);
    if (r.fock_cutoff) {
        o["fock_cutoff"] = *r.fock_cutoff;
    } else {
        o["fock_cutoff"] = nullptr;
    }
    o["t_gate"] = r.t_gate;
    o["dt"] = r.dt;
    o["steps"] = r.steps;
    o["dissipative"] = r.dissipative;
    o["basis"] = {"00", "01", "10", "11"};
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < 4; ++i) {
        ojson row = ojson::array();
        for (Eigen::Index j = 0; j < 4; ++j) {
            row.push_back(complex_pair(r.extracted(i, j)));
        }
        rows.push_back(row);
    }
    o["extracted_gate"] = rows;
    o["leakage"] = {r.leakage[0], r.leakage[1], r.leakage[2], r.leakage[3]};
    o["fidelity"] = r.fidelity;
    o["phase_10"] = r.phase_10;
    return json_text(o);
}

std::string berry_report_json(const BerryReport& r)
{
    ojson o;
    o["loop"] = {{"theta0", r.theta0},
                 {"windings", r.windings},
                 {"T", r.total_time},
                 {"Omega_bar", r.Omega_bar}};
    o["dt"] = r.dt;
    o["steps"] = r.steps;
    o["numeric_phase"] = r.numeric_phase;
    o["surface_integral"] = r.surface_integral;
    o["half_surface_integral"] = r.half_surface_integral;
    o["dynamical_phase_bound"] = r.dynamical_phase_bound;
    o["adiabatic_leakage"] = r.adiabatic_leakage;
    o["return_amplitude"] = r.return_amplitude;
    o["max_energy"] = r.max_energy;
    ojson dec = ojson::array();
    for (const DecoupledResult& d : r.decoupled) {
        ojson e;
        e["input"] = label_name(d.input);
        e["amplitude"] = complex_pair(d.amplitude);
        e["phase"] = d.phase;
        dec.push_back(e);
    }
    o["decoupled"] = dec;
    o["adiabatic"] = r.adiabatic;
    o["warning"] = r.warning;
    return json_text(o);
}

std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw IoError("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

RunOutput run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                       std::size_t workers)
{
    TaskFiles task;
    switch (config.task) {
    case Task::Dump:
        task = run_dump(config);
        break;
    case Task::Simulate:
        task = run_simulate(config);
        break;
    case Task::Gate:
        task = run_gate(config, workers);
        break;
    case Task::Scan:
        task = run_scan(config, workers);
        break;
    case Task::Berry:
        task = run_berry(config, workers);
        break;
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw IoError("cannot create output directory " + out_dir.string());
    }

    const std::string cfg = canonical_config(config, false);
    task.files.push_back({"config.json", cfg});

    ojson manifest;
    manifest["tool"] = "qcavity";
    manifest["version"] = kToolVersion;
    manifest["task"] = std::string(to_string(config.task));
    manifest["model"] = std::string(to_string(config.model));
    manifest["config_sha256"] = sha256_hex(cfg);
    ojson files = ojson::array();
    RunOutput out;
    out.directory = out_dir;
    for (const auto& [name, contents] : task.files) {
        write_atomic(out_dir, name, contents);
        files.push_back({{"name", name}, {"bytes", contents.size()}, {"sha256", sha256_hex(contents)}});
        out.files.push_back(name);
    }
    manifest["files"] = files;
    write_atomic(out_dir, "manifest.json", json_text(manifest));
    out.files.push_back("manifest.json");
    out.summary = task.summary;
    return out;
}

} // namespace qcavity
