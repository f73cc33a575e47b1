#include "persist/cli/app.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "persist/cli/manifest.hpp"
#include "persist/cli/metrics_csv.hpp"
#include "persist/cli/plot.hpp"
#include "persist/errors.hpp"
#include "persist/nn/arch.hpp"

namespace persist::cli {

namespace fs = std::filesystem;

namespace {

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
}

// Appends config-file values for options absent from `args`, so command-line flags win.
std::vector<std::string> merge_config_file(CLI::App& run, std::vector<std::string> args, const std::string& path) {
    if (!fs::exists(path)) throw CLI::FileError::Missing(path);
    for (const auto& item : CLI::ConfigTOML{}.from_file(path)) {
        if (item.name == "++" || item.name == "--") continue;
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == "run"))
            throw CLI::ConfigError::Extras("[" + item.fullname() + "]");
        const std::string flag = "--" + item.name;
        const auto* option = run.get_option_no_throw(flag);
        if (option == nullptr || item.name == "config") throw CLI::ConfigError::Extras(item.fullname());
        if (given_on_command_line(args, flag)) continue;
        if (option->get_expected_min() == 0) {
            if (item.inputs.size() == 1 && CLI::detail::to_flag_value(item.inputs.front()) > 0) args.push_back(flag);
            continue;
        }
        std::string joined;
        for (const auto& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
        args.push_back(flag);
        args.push_back(joined);
    }
    return args;
}

struct RunOptions {
    std::string dataset = "blobs";
    std::string arch = "dense:64,relu";
    std::vector<std::size_t> batch_sizes{256};
    std::vector<int> persistency{1};
    double lr = 0.001;
    double momentum = 0.5;
    bool adaptive_lr = false;
    int epochs = 100;
    std::uint64_t seed = 0;
    bool no_reshuffle = false;
    int eval_every = 1;
    double train_fraction = 0.8;
    std::string out = ".";
    int jobs = 1;
};

std::string run_stem(const train::ExperimentConfig& config) {
    std::string stem = "m" + std::to_string(config.policy.batch_size) + "_K" + std::to_string(config.policy.persistency);
    if (config.optimizer.lr_policy == optim::LrPolicy::AdaptivePersistency) stem += "_adaptive";
    return stem;
}

// Maps library exceptions onto exit codes; anything else propagates.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DivergenceError& e) {
        err << "divergence: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const ShapeError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
}

// Trains one configuration and writes its metrics CSV and manifest into `out_dir`.
void execute(RunManifest manifest, const data::Dataset& train_set, const data::Dataset& test_set,
             const fs::path& out_dir, std::ostream& log) {
    const auto result = train::train(manifest.config, train_set, test_set);
    const std::string stem = run_stem(manifest.config);
    manifest.metrics_csv = "metrics_" + stem + ".csv";
    manifest.manifest = "manifest_" + stem + ".json";
    write_metrics_csv(out_dir / manifest.metrics_csv, result.records);
    write_manifest(out_dir / manifest.manifest, manifest);
    const auto& last = result.records.back();
    log << stem << ": epochs=" << last.epoch << " test_acc=" << last.test_acc << " test_loss=" << last.test_loss
        << " updates=" << last.updates << " loads=" << last.minibatch_loads << " -> "
        << (out_dir / manifest.metrics_csv).string() << '\n';
}

int do_run(const RunOptions& opt, bool seed_given, std::ostream& out, std::ostream& err) {
    std::uint64_t seed = opt.seed;
    if (!seed_given) {
        if (const char* env = std::getenv("PERSIST_SGD_SEED")) {
            try {
                std::size_t used = 0;
                seed = std::stoull(env, &used);
                if (env[used] != '\0') throw std::invalid_argument(env);
            } catch (const std::exception&) {
                throw ConfigError(std::string("PERSIST_SGD_SEED is not an unsigned integer: ") + env);
            }
        }
    }
    if (opt.jobs < 1) throw ConfigError("--jobs must be >= 1");
    if (opt.batch_sizes.empty() || opt.persistency.empty()) throw ConfigError("empty --batch-size or --persistency list");

    const auto source = DatasetSource::parse(opt.dataset, opt.train_fraction);
    const auto [train_set, test_set] = source.load(seed);
    const auto arch =
        nn::parse_architecture(opt.arch, train_set.shape(), static_cast<std::size_t>(train_set.num_classes()));

    std::vector<RunManifest> runs;
    for (std::size_t m : opt.batch_sizes) {
        for (int k : opt.persistency) {
            RunManifest manifest;
            auto& c = manifest.config;
            c.policy = {k, m, !opt.no_reshuffle};
            c.optimizer = {opt.lr, opt.momentum,
                           opt.adaptive_lr ? optim::LrPolicy::AdaptivePersistency : optim::LrPolicy::Constant};
            c.epochs = opt.epochs;
            c.seed = seed;
            c.architecture = arch;
            c.eval_every = opt.eval_every;
            c.validate();
            manifest.source = source;
            manifest.train_size = train_set.size();
            manifest.test_size = test_set.size();
            manifest.num_classes = train_set.num_classes();
            manifest.input_shape = train_set.shape();
            runs.push_back(std::move(manifest));
        }
    }

    const fs::path out_dir(opt.out);
    fs::create_directories(out_dir);

    std::vector<int> codes(runs.size(), kExitOk);
    std::vector<std::string> logs(runs.size());
    std::vector<std::string> errors(runs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < runs.size();) {
            std::ostringstream log;
            std::ostringstream elog;
            codes[i] = guarded(elog, [&] {
                execute(runs[i], train_set, test_set, out_dir, log);
                return kExitOk;
            });
            logs[i] = log.str();
            errors[i] = elog.str();
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(opt.jobs), runs.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }

    int code = kExitOk;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        out << logs[i];
        err << errors[i];
        if (code == kExitOk) code = codes[i];
    }
    return code;
}

int do_replay(const fs::path& manifest_path, const fs::path& out_dir, std::ostream& out) {
    const auto manifest = read_manifest(manifest_path);
    const auto [train_set, test_set] = manifest.source.load(manifest.config.seed);
    if (train_set.size() != manifest.train_size || test_set.size() != manifest.test_size ||
        train_set.num_classes() != manifest.num_classes || train_set.shape() != manifest.input_shape)
        throw DataError("dataset '" + manifest.source.descriptor + "' no longer matches the manifest");
    fs::create_directories(out_dir);
    execute(manifest, train_set, test_set, out_dir, out);
    return kExitOk;
}

int do_plot(const std::vector<std::string>& csvs, const fs::path& out_path, std::ostream& out) {
    std::vector<Series> series;
    for (const auto& csv : csvs) {
        auto records = read_metrics_csv(csv);
        if (records.empty()) throw DataError(csv + ": metrics file has no data rows");
        series.push_back({series_label(csv), std::move(records)});
    }
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    std::ofstream file(out_path);
    if (!file) throw DataError("cannot write plot " + out_path.string());
    file << render_figure(series);
    out << "wrote " << out_path.string() << '\n';
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Minibatch-persistency SGD experiments", "persist-sgd"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    RunOptions opt;
    auto* run = app.add_subcommand("run", "Train one configuration or a sweep over --batch-size x --persistency");
    std::string config_path;
    run->add_option("--config", config_path, "TOML/INI file with option values (flags take precedence)");
    run->add_option("--dataset", opt.dataset, "blobs[:C,PER_CLASS,DIM,SPREAD] | csv:PATH | idx:IMAGES,LABELS")
        ->capture_default_str();
    run->add_option("--arch", opt.arch, "Layer list, e.g. dense:64,relu or conv:8x3,relu,pool,flatten")
        ->capture_default_str();
    run->add_option("--batch-size", opt.batch_sizes, "Minibatch size m (comma-separated list for a sweep)")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--persistency", opt.persistency, "Persistency K (comma-separated list for a sweep)")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--lr", opt.lr, "Base learning rate mu")->capture_default_str();
    run->add_option("--momentum", opt.momentum, "Momentum coefficient gamma")->capture_default_str();
    run->add_flag("--adaptive-lr", opt.adaptive_lr, "Use k*mu on the k-th use of a minibatch");
    run->add_option("--epochs", opt.epochs, "Training epochs")->capture_default_str();
    auto* seed_opt = run->add_option("--seed", opt.seed, "Seed (falls back to $PERSIST_SGD_SEED, then 0)");
    run->add_flag("--no-reshuffle", opt.no_reshuffle, "Reuse the first epoch's permutation every epoch");
    run->add_option("--eval-every", opt.eval_every, "Epochs between test evaluations")->capture_default_str();
    run->add_option("--train-fraction", opt.train_fraction, "Train share when splitting csv/idx data")
        ->capture_default_str();
    run->add_option("--out", opt.out, "Output directory")->capture_default_str();
    run->add_option("--jobs", opt.jobs, "Concurrent sweep members")->capture_default_str();

    std::string manifest_path;
    std::string replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run the experiment recorded in a manifest");
    replay->add_option("manifest", manifest_path, "Manifest JSON written by run")->required();
    replay->add_option("--out", replay_out, "Output directory")->required();

    std::vector<std::string> csvs;
    std::string plot_out = "figure.svg";
    auto* plot = app.add_subcommand("plot", "Render metrics CSVs as a 2x2 SVG figure");
    plot->add_option("csv", csvs, "Metrics CSV files")->required();
    plot->add_option("--out", plot_out, "SVG output path")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (*run && !config_path.empty()) {
            const auto merged = merge_config_file(*run, args, config_path);
            reversed.assign(merged.rbegin(), merged.rend());
            app.clear();
            app.parse(reversed);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    return guarded(err, [&] {
        if (*run) return do_run(opt, seed_opt->count() > 0, out, err);
        if (*replay) return do_replay(manifest_path, replay_out, out);
        return do_plot(csvs, plot_out, out);
    });
}

} // namespace persist::cli
