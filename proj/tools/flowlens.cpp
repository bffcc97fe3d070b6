#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "flowlens/flights.hpp"
#include "flowlens/server.hpp"
#include "flowlens/session.hpp"

namespace fs = std::filesystem;
using namespace flowlens;

namespace {

struct common_args {
    std::string spec;
    std::string data_dir;
    std::string events;
    std::string out;
};

fs::path data_dir_for(const common_args& a) {
    if (!a.data_dir.empty())
        return a.data_dir;
    auto parent = fs::path(a.spec).parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

std::unique_ptr<session> open_session(const common_args& a, std::string& text) {
    text = read_text_file(a.spec);
    auto s = std::make_unique<session>(text, data_dir_for(a));
    if (!a.events.empty())
        for (const auto& e : parse_events(read_text_file(a.events)))
            s->apply(e);
    return s;
}

int run_serve(const common_args& a, std::string host, int port) {
    if (const char* env = std::getenv("FLOWLENS_PORT"))
        port = std::stoi(env);
    std::string text = read_text_file(a.spec);
    service svc(text, data_dir_for(a));
    http_server server(svc);
    int bound = server.bind(host, port);
    if (bound < 0)
        throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    std::cerr << "serving " << a.spec << " on http://" << host << ":" << bound << "\n";
    server.listen();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowlens: chart spec profiler"};
    app.require_subcommand(0, 1);

    std::size_t gen_rows = 0;
    std::uint64_t seed = 42;
    std::string gen_out = "flights.csv";
    app.add_option("--gen-flights", gen_rows, "Write N synthetic flight rows as CSV and exit");
    app.add_option("--seed", seed, "Generator seed")->capture_default_str();
    app.add_option("--gen-out", gen_out, "Generator output file")->capture_default_str();

    common_args args;
    auto add_common = [&](CLI::App* sub, bool events) {
        sub->add_option("spec", args.spec, "Chart spec (.json)")->required()->check(CLI::ExistingFile);
        sub->add_option("--data-dir", args.data_dir, "Directory for url datasets (default: the spec's directory)");
        if (events)
            sub->add_option("--events", args.events, "Event script: [{\"signal\": name, \"value\": v}, ...]")
                ->check(CLI::ExistingFile);
    };

    auto* profile = app.add_subcommand("profile", "Run the spec and write a profile report");
    add_common(profile, true);
    profile->add_option("-o,--out", args.out, "Report file (default: stdout)");

    auto* render = app.add_subcommand("render", "Run the spec and write the chart as SVG");
    add_common(render, false);
    render->add_option("-o,--out", args.out, "SVG file (default: stdout)");

    auto* pulses = app.add_subcommand("pulses", "Print one summary line per pulse");
    add_common(pulses, true);

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the report and live signal updates over HTTP");
    add_common(serve, false);
    serve->add_option("--port", port, "Port (FLOWLENS_PORT overrides)")->capture_default_str();
    serve->add_option("--host", host, "Interface to bind")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    std::string text;
    try {
        if (gen_rows > 0 && app.get_subcommands().empty()) {
            std::ofstream out(gen_out, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write " + gen_out);
            write_flights_csv(out, gen_rows, seed);
            return 0;
        }
        if (profile->parsed()) {
            auto s = open_session(args, text);
            write_output(args.out, serialize_report(s->report()));
        } else if (render->parsed()) {
            auto s = open_session(args, text);
            write_output(args.out, s->svg());
        } else if (pulses->parsed()) {
            auto s = open_session(args, text);
            for (const auto& p : s->rt().pulses()) {
                std::cout << "pulse " << p.id << "  "
                          << (p.trigger ? p.trigger->name + "=" + p.trigger->value.to_display() : std::string("init"))
                          << "  wall " << p.wall_total_ns << " ns  evaluated " << p.evaluated.size() << "\n";
            }
        } else if (serve->parsed()) {
            return run_serve(args, host, port);
        } else {
            std::cout << app.help();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << format_failure(describe_failure(e, text)) << "\n";
        return 1;
    }
    return 0;
}
