// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "radfield/dosimetry/dosimetry.hpp"
#include "radfield/errors.hpp"
#include "radfield/field/codec.hpp"
#include "radfield/sim/simulation.hpp"

namespace radfield::cli {
namespace {

struct Failure {
    int code;
    const char* tag;
};

std::string vec_str(const Eigen::Vector3d& v) {
    std::ostringstream s;
    s << '(' << v.x() << ", " << v.y() << ", " << v.z() << ')';
    return s.str();
}

std::string shape_str(const FieldShape& shape) {
    std::ostringstream s;
    if (const auto* c = std::get_if<ConeShape>(&shape)) {
        s << "cone, opening angle " << c->opening_angle_deg << " deg";
    } else {
        const auto& p = std::get<PyramidShape>(shape);
        s << "pyramid, " << p.rect_w_m << " x " << p.rect_h_m << " m at " << p.at_distance_m << " m";
    }
    return s.str();
}

std::string value_str(const DynamicValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return '"' + x + '"';
            } else if constexpr (std::is_same_v<T, Eigen::Vector3d>) {
                return vec_str(x);
            } else {
                std::ostringstream s;
                s << x;
                return s.str();
            }
        },
        v);
}

Eigen::Vector3d to_vec3(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

struct ScanArgs {
    std::string field;
    std::vector<std::string> channels{"beam", "scatter"};
    std::vector<double> center{0.0, 0.0, 0.0};
    double radius = 0.0;
    double step = 10.0;
    std::string plane = "xy";
    bool nearest = false;
};

void add_scan_options(CLI::App& cmd, ScanArgs& a) {
    cmd.add_option("--channels", a.channels, "Channels summed into the kerma tensor")->delimiter(',');
    cmd.add_option("--center", a.center, "Circle centre x,y,z in metres")->delimiter(',')->expected(3);
    cmd.add_option("--radius", a.radius, "Circle radius in metres")->required();
    cmd.add_option("--step", a.step, "Angular step in degrees");
    cmd.add_option("--plane", a.plane, "Circle plane: xy, xz or yz");
    cmd.add_flag("--nearest", a.nearest, "Sample the containing voxel instead of interpolating");
}

PolarScanCurve simulated_curve(const ScanArgs& a) {
    const RadiationField field = read_field_file(a.field);
    const KermaTensor tensor = kerma_tensor(field, a.channels);
    return polar_scan(tensor, to_vec3(a.center), a.radius, parse_scan_plane(a.plane), a.step,
                      a.nearest ? ScanSampling::Nearest : ScanSampling::Trilinear);
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    body(out);
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

int cmd_simulate(const std::string& config_path, std::ostream& out, std::ostream& err) {
    RunConfig config = RunConfig::load(config_path);
    if (const char* threads = std::getenv("RADFIELD_THREADS"); threads != nullptr && *threads != '\0') {
        char* end = nullptr;
        const long n = std::strtol(threads, &end, 10);
        if (*end != '\0' || n < 1 || n > 1024) {
            throw InputError("RADFIELD_THREADS must be an integer in [1, 1024]");
        }
        config.workers = static_cast<unsigned>(n);
    }
    const auto start = std::chrono::steady_clock::now();
    const RunResult result = run_simulation(config, [&](std::uint64_t n, double eps) {
        out << "  " << n << " primaries, field epsilon " << eps << '\n';
    });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        write_field_file(result.field, config.output_path);
    } catch (const FieldError& e) {
        if (e.code() == FieldErrc::Io) {
            throw IoError(e.what());
        }
        throw;
    }
    out << "primaries traced: " << result.primaries << '\n'
        << "field epsilon: " << result.field_epsilon << " (threshold " << config.epsilon_threshold << ")\n"
        << "capped tracks: " << result.capped_tracks << '\n'
        << "wall time: " << std::fixed << std::setprecision(2) << seconds << " s\n"
        << "wrote " << config.output_path.string() << '\n';
    if (!result.converged) {
        err << "radfield: error[E_BUDGET]: photon budget of " << config.max_photons
            << " spent before reaching epsilon " << config.epsilon_threshold << "; field written unconverged\n";
        return k_budget;
    }
    return k_ok;
}

int cmd_inspect(const std::string& path, std::ostream& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    StreamSource source(in);
    const FieldIndex index = read_index(source);
    const FixedMetadata& m = index.metadata.fixed;
    const GridSpec& g = index.grid;
    out << "file: " << path << " (" << source.size() << " bytes)\n"
        << "grid: " << g.counts.x() << " x " << g.counts.y() << " x " << g.counts.z() << " voxels of "
        << vec_str(g.voxel_m) << " m, origin " << vec_str(g.origin_m) << " m, extent " << vec_str(g.extent_m)
        << " m\n"
        << "binning: " << index.binning.bin_count << " bins of " << index.binning.bin_width_keV << " keV\n"
        << "metadata:\n"
        << "  software: " << m.software_name << ' ' << m.software_version << '\n'
        << "  physics model: " << m.physics_model_id << '\n'
        << "  scene digest: " << m.scene_digest << '\n'
        << "  tube position: " << vec_str(m.tube_position_m) << " m\n"
        << "  tube direction: " << vec_str(m.tube_direction) << '\n'
        << "  field shape: " << shape_str(m.field_shape) << '\n'
        << "  spectrum: " << m.spectrum_id << '\n'
        << "  primaries: " << m.primary_count << '\n'
        << "  seed: " << m.rng_seed << '\n'
        << "  epsilon achieved: " << m.epsilon_rel_achieved << '\n'
        << "  timestamp: " << m.timestamp_utc << '\n';
    if (!index.metadata.dynamic.empty()) {
        out << "dynamic metadata:\n";
        for (const auto& [key, value] : index.metadata.dynamic) {
            out << "  " << key << ": " << value_str(value) << '\n';
        }
    }
    out << "channels:\n";
    for (const auto& [channel, layers] : index.channels) {
        out << "  " << channel << '\n';
        for (const LayerEntry& e : layers) {
            // Loading the layer verifies its checksum.
            read_layer(index, source, channel, e.name);
            out << "    " << std::left << std::setw(12) << e.name << std::setw(14) << to_string(e.kind)
                << "arity " << std::setw(4) << e.arity << "unit " << std::setw(12) << ('"' + e.unit + '"')
                << "error " << std::setw(12) << e.statistical_error << e.length << " bytes\n";
        }
    }
    return k_ok;
}

int cmd_scan(const ScanArgs& a, const std::string& out_path, std::ostream& out) {
    const PolarScanCurve curve = simulated_curve(a);
    if (out_path.empty()) {
        write_curve_csv(out, curve);
    } else {
        write_file(out_path, [&](std::ostream& o) { write_curve_csv(o, curve); });
        out << "wrote " << curve.samples.size() << " angles to " << out_path << '\n';
    }
    return k_ok;
}

void print_stats(std::ostream& out, const char* label, const ErrorStats& s) {
    out << label << ": n=" << s.points.size() << " median=" << s.median_rel << " mean=" << s.mean_rel
        << " std=" << s.std_rel << '\n';
}

int cmd_compare(const ScanArgs& a, const std::string& measured_path, const std::vector<double>& exclude,
                const std::string& out_path, std::ostream& out) {
    const PolarScanCurve measured = read_curve_csv(measured_path);
    const PolarScanCurve simulated = simulated_curve(a);
    const double sc = conversion_factor(measured, simulated);
    const PolarScanCurve calibrated = scaled(simulated, sc);
    const ErrorStats all = error_stats(measured, calibrated, {});
    out << std::setprecision(10) << "S_c: " << sc << '\n';
    print_stats(out, "all angles", all);
    if (!exclude.empty()) {
        print_stats(out, "excluding", error_stats(measured, calibrated, exclude));
    }
    if (!out_path.empty()) {
        write_file(out_path, [&](std::ostream& o) { write_comparison_csv(o, all); });
    }
    return k_ok;
}

int fail(std::ostream& err, const Failure& f, const std::string& message) {
    err << "radfield: error[" << f.tag << "]: " << message << '\n';
    return f.code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Voxelized X-ray scatter fields: simulate, inspect, scan and compare.\n"
                 "Exit codes: 0 success, 2 invalid input, 3 photon budget exhausted, 4 I/O failure.",
                 "radfield"};
    app.require_subcommand(1);

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "Run a simulation described by a JSON config");
    simulate->add_option("--config", config_path, "Run configuration (JSON)")->required();

    std::string inspect_path;
    auto* inspect = app.add_subcommand("inspect", "Summarize a field file");
    inspect->add_option("file", inspect_path, "Field file")->required();

    ScanArgs scan_args;
    std::string scan_out;
    auto* scan = app.add_subcommand("scan", "Sample relative air kerma on a circle");
    scan->add_option("file", scan_args.field, "Field file")->required();
    add_scan_options(*scan, scan_args);
    scan->add_option("--out", scan_out, "Output CSV (angle_deg,value); stdout if omitted");

    ScanArgs cmp_args;
    std::string measured_path;
    std::string cmp_out;
    std::vector<double> exclude;
    auto* compare = app.add_subcommand("compare", "Calibrate a simulated scan against measurements");
    compare->add_option("--measured", measured_path, "Measured curve CSV (angle_deg,value)")->required();
    compare->add_option("--field", cmp_args.field, "Field file")->required();
    add_scan_options(*compare, cmp_args);
    compare->add_option("--exclude", exclude, "Angles left out of the second statistics line")->delimiter(',');
    compare->add_option("--out", cmp_out, "Per-angle CSV (angle_deg,measured,simulated_scaled,e_rel)");

    std::vector<const char*> argv{"radfield"};
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return fail(err, {k_input, "E_USAGE"}, e.what());
    }

    try {
        if (*simulate) return cmd_simulate(config_path, out, err);
        if (*inspect) return cmd_inspect(inspect_path, out);
        if (*scan) return cmd_scan(scan_args, scan_out, out);
        if (*compare) return cmd_compare(cmp_args, measured_path, exclude, cmp_out, out);
    } catch (const IoError& e) {
        return fail(err, {k_io, "E_IO"}, e.what());
    } catch (const FieldError& e) {
        if (e.code() == FieldErrc::Io) {
            return fail(err, {k_io, "E_IO"}, e.what());
        }
        return fail(err, {k_input, "E_FIELD"}, e.what());
    } catch (const InputError& e) {
        return fail(err, {k_input, "E_INPUT"}, e.what());
    } catch (const std::out_of_range& e) {
        return fail(err, {k_input, "E_RANGE"}, e.what());
    } catch (const std::exception& e) {
        return fail(err, {1, "E_INTERNAL"}, e.what());
    }
    return k_input;
}

}  // namespace radfield::cli
