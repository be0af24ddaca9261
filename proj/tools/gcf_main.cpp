// gcf: train a graph collaborative-filtering model, craft item-promotion
// edge perturbations, and evaluate them under white-box, black-box and
// retraining protocols.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gcf/attack.hpp"
#include "gcf/baselines.hpp"
#include "gcf/eval.hpp"
#include "gcf/interactions.hpp"
#include "gcf/model.hpp"
#include "gcf/parallel.hpp"
#include "gcf/rng.hpp"
#include "gcf/synthetic.hpp"
#include "gcf/training.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gcf;

std::string default_out_dir() {
    if (const char* env = std::getenv("GCF_OUT_DIR")) return env;
    return ".";
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty() && dir != ".") fs::create_directories(dir);
}

// --config FILE holds a flat JSON object of long option names. Values act as
// defaults: tokens are appended only for options absent from the real argv,
// so explicit flags always win. Rerunning with the persisted config file
// reproduces a run exactly.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
    std::string config_path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) config_path = args[k + 1];
        else if (args[k].rfind("--config=", 0) == 0) config_path = args[k].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (!j.is_object()) throw std::runtime_error("config file must hold a JSON object");

    auto present = [&args](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };

    std::vector<std::string> merged = args;
    for (const auto& [key, value] : j.items()) {
        const std::string flag = "--" + key;
        if (present(flag)) continue;
        auto push_scalar = [&](const nlohmann::json& v) {
            merged.push_back(flag);
            if (v.is_string())
                merged.push_back(v.get<std::string>());
            else
                merged.push_back(v.dump());
        };
        if (value.is_boolean()) {
            if (value.get<bool>()) merged.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& v : value) push_scalar(v);
        } else {
            push_scalar(value);
        }
    }
    return merged;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string data;
    std::string out;
    std::string log;
    std::string out_dir = default_out_dir();
    std::uint32_t layers = 3;
    std::uint32_t dim = 64;
    std::uint32_t epochs = 1000;
    std::uint64_t seed = 2020;
    double lr = 1e-3;
    double l2 = 1e-4;
    std::uint32_t batch = 2048;
};

int run_train(const TrainArgs& a) {
    ensure_dir(a.out_dir);
    const std::string out = a.out.empty() ? a.out_dir + "/model.ckpt" : a.out;
    const std::string log = a.log.empty() ? a.out_dir + "/train_log.csv" : a.log;

    InteractionMatrix R = InteractionMatrix::load(a.data);
    ModelConfig config;
    config.num_layers = a.layers;
    config.embed_dim = a.dim;
    config.epochs = a.epochs;
    config.seed = a.seed;
    config.learning_rate = a.lr;
    config.l2_reg = a.l2;
    config.batch_size = a.batch;

    std::ofstream log_stream(log);
    if (!log_stream) throw std::runtime_error("cannot write " + log);
    TrainedModel model = train(R, config, &log_stream);
    save_checkpoint(model, out);

    nlohmann::json rc = {{"data", a.data},     {"out", out},     {"log", log},
                         {"layers", a.layers}, {"dim", a.dim},   {"epochs", a.epochs},
                         {"seed", a.seed},     {"lr", a.lr},     {"l2", a.l2},
                         {"batch", a.batch},   {"out-dir", a.out_dir}};
    write_json(a.out_dir + "/train_config.json", rc);
    std::cout << "wrote " << out << " (" << R.num_users() << " users, " << R.num_items()
              << " items, " << R.num_entries() << " interactions)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

struct AttackArgs {
    std::string model;
    std::string data;
    std::string method = "proposed";
    std::string out;
    std::string saliency;
    std::string out_dir = default_out_dir();
    std::uint32_t target = 0;
    std::uint32_t budget = 0;
    double lambda = 0.5;
    double gamma = 0.95;
    std::uint32_t objective_k = 50;
    std::uint32_t fallback_pool = 0;
    std::uint64_t seed = 0;
};

int run_attack_cmd(const AttackArgs& a) {
    ensure_dir(a.out_dir);
    const std::string out = a.out.empty() ? a.out_dir + "/perturbation.json" : a.out;

    TrainedModel model = load_checkpoint(a.model);
    InteractionMatrix R = InteractionMatrix::load(a.data);
    if (model.num_users != R.num_users() || model.num_items != R.num_items())
        throw std::runtime_error("checkpoint dimensions do not match the dataset");

    AttackMethod method = attack_method_from_string(a.method);
    AttackConfig cfg;
    cfg.lambda = a.lambda;
    cfg.gamma = a.gamma;
    cfg.objective_k = a.objective_k;
    cfg.budget = a.budget;
    cfg.fallback_pool_size = a.fallback_pool;

    Perturbation p;
    if (method == AttackMethod::kProposed && !a.saliency.empty()) {
        MaskedUserSet mask =
            mask_users(model, R, a.target, cfg.gamma, cfg.effective_fallback_pool());
        SaliencyColumn sal =
            grad_target_column(model, R, a.target, mask, cfg.lambda, cfg.objective_k);
        std::vector<std::uint32_t> selected = select_topk_edges(sal, cfg.budget);
        dump_saliency_csv(a.saliency, sal, selected);
        p = build_mask_and_perturb(R, a.target, selected, cfg.budget, "proposed");
    } else {
        if (!a.saliency.empty())
            throw std::runtime_error("--saliency is only available with --method proposed");
        p = craft_perturbation(method, model, R, a.target, cfg, a.seed);
        p.seed = a.seed;
    }
    p.save(out);

    nlohmann::json rc = {{"model", a.model},
                         {"data", a.data},
                         {"method", a.method},
                         {"target", a.target},
                         {"budget", a.budget},
                         {"lambda", a.lambda},
                         {"gamma", a.gamma},
                         {"objective-k", a.objective_k},
                         {"fallback-pool", a.fallback_pool},
                         {"seed", a.seed},
                         {"out", out},
                         {"out-dir", a.out_dir}};
    if (!a.saliency.empty()) rc["saliency"] = a.saliency;
    write_json(a.out_dir + "/attack_config.json", rc);
    std::cout << "wrote " << out << " (" << p.added_users.size() << " of " << p.budget
              << " budget edges)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval / sweep
// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string model;
    std::string data;
    std::string test;
    std::string protocol = "whitebox";
    std::vector<std::string> methods{"all"};
    std::string out_dir = default_out_dir();
    std::string dataset_label;
    double item_set = 10.0;
    int budget_variant = 1;
    std::uint32_t budget = 0;  // 0: derive from item_set/budget_variant
    std::vector<std::uint32_t> ks;
    std::uint32_t num_items = 30;
    std::vector<std::uint32_t> targets;  // explicit target items override sampling
    std::uint64_t seed = 0;
    int threads = gcf::default_threads();
    double lambda = 0.5;
    double gamma = 0.95;
    std::uint32_t objective_k = 50;
    std::uint32_t fallback_pool = 0;
    std::vector<std::string> victims;  // "L:d:epochs:seed"
    std::uint32_t retrain_epochs = 0;  // 0: same as source
    // sweep-only
    std::string sweep_param;
    std::string grid;
};

std::vector<AttackMethod> parse_methods(const std::vector<std::string>& names) {
    std::vector<AttackMethod> out;
    for (const auto& n : names) {
        if (n == "all") {
            auto all = gcf::all_attack_methods();
            out.insert(out.end(), all.begin(), all.end());
        } else {
            out.push_back(attack_method_from_string(n));
        }
    }
    std::vector<AttackMethod> dedup;
    for (AttackMethod m : out)
        if (std::find(dedup.begin(), dedup.end(), m) == dedup.end()) dedup.push_back(m);
    return dedup;
}

ModelConfig parse_victim(const std::string& spec, const ModelConfig& base) {
    std::uint32_t L = 0, d = 0, epochs = 0;
    std::uint64_t seed = 0;
    if (std::sscanf(spec.c_str(), "%u:%u:%u:%llu", &L, &d, &epochs,
                    reinterpret_cast<unsigned long long*>(&seed)) != 4)
        throw std::runtime_error("victim spec must be L:d:epochs:seed, got " + spec);
    ModelConfig vc = base;
    vc.num_layers = L;
    vc.embed_dim = d;
    vc.epochs = epochs;
    vc.seed = seed;
    vc.layer_weights.clear();
    return vc;
}

struct EvalSetup {
    TrainedModel model;
    InteractionMatrix R;
    std::optional<InteractionMatrix> test;
    std::vector<std::uint32_t> items;
    EvalConfig config;
    std::vector<AttackMethod> methods;
};

EvalSetup prepare_eval(const EvalArgs& a) {
    EvalSetup s;
    s.model = load_checkpoint(a.model);
    s.R = InteractionMatrix::load(a.data);
    if (s.model.num_users != s.R.num_users() || s.model.num_items != s.R.num_items())
        throw std::runtime_error("checkpoint dimensions do not match the dataset");
    if (!a.test.empty()) s.test = InteractionMatrix::load(a.test);

    DegreeProfile deg = compute_degrees(s.R);
    s.config.attack.lambda = a.lambda;
    s.config.attack.gamma = a.gamma;
    s.config.attack.objective_k = a.objective_k;
    s.config.attack.fallback_pool_size = a.fallback_pool;
    s.config.attack.budget =
        a.budget > 0 ? a.budget : compute_budget(deg, a.item_set, a.budget_variant);
    s.config.ks = a.ks.empty() ? std::vector<std::uint32_t>{50} : a.ks;
    s.config.seed = a.seed;
    s.config.threads = a.threads;
    s.config.quality_metrics = s.test.has_value();
    s.config.dataset_label =
        a.dataset_label.empty() ? fs::path(a.data).stem().string() : a.dataset_label;
    s.config.item_percentile = a.item_set;
    s.config.budget_variant = a.budget_variant;

    s.items = a.targets.empty()
                  ? sample_target_items(deg, a.item_set, a.num_items, a.seed)
                  : a.targets;
    if (s.items.empty()) throw std::runtime_error("no target items selected");
    s.methods = parse_methods(a.methods);
    return s;
}

nlohmann::json eval_config_json(const EvalArgs& a, const EvalSetup& s) {
    nlohmann::json rc = {{"model", a.model},
                         {"data", a.data},
                         {"protocol", a.protocol},
                         {"method", a.methods},
                         {"item-set", a.item_set},
                         {"budget-variant", a.budget_variant},
                         {"budget", s.config.attack.budget},
                         {"k", s.config.ks},
                         {"num-items", a.num_items},
                         {"target", s.items},
                         {"seed", a.seed},
                         {"threads", a.threads},
                         {"lambda", a.lambda},
                         {"gamma", a.gamma},
                         {"objective-k", a.objective_k},
                         {"dataset-label", s.config.dataset_label},
                         {"out-dir", a.out_dir}};
    if (!a.test.empty()) rc["test"] = a.test;
    if (!a.victims.empty()) rc["victims"] = a.victims;
    if (a.retrain_epochs > 0) rc["retrain-epochs"] = a.retrain_epochs;
    return rc;
}

int run_eval(const EvalArgs& a) {
    ensure_dir(a.out_dir);
    EvalSetup s = prepare_eval(a);
    const InteractionMatrix* test = s.test ? &*s.test : nullptr;

    ExperimentReport report;
    if (a.protocol == "whitebox") {
        report = experiment_whitebox(s.model, s.R, test, s.methods, s.items, s.config);
    } else if (a.protocol == "blackbox") {
        std::vector<std::string> specs = a.victims;
        if (specs.empty()) {
            // three victims varying depth, width and seed
            auto e = std::to_string(s.model.config.epochs);
            specs = {"2:64:" + e + ":2022", "2:128:" + e + ":2023", "3:128:" + e + ":2024"};
        }
        std::vector<ModelConfig> victims;
        for (const auto& spec : specs) victims.push_back(parse_victim(spec, s.model.config));
        report = experiment_blackbox(s.model, victims, s.R, test, s.methods, s.items, s.config);
    } else if (a.protocol == "retrain") {
        std::vector<Perturbation> perturbations;
        for (std::uint32_t t : s.items) {
            const std::uint64_t item_seed = gcf::derive_seed(s.config.seed, t);
            for (AttackMethod m : s.methods) {
                Perturbation p =
                    craft_perturbation(m, s.model, s.R, t, s.config.attack, item_seed);
                p.seed = item_seed;
                perturbations.push_back(std::move(p));
            }
        }
        ModelConfig retrain_config = s.model.config;
        if (a.retrain_epochs > 0) retrain_config.epochs = a.retrain_epochs;
        report = experiment_retrain(s.R, perturbations, retrain_config, test, s.config);
    } else {
        throw std::runtime_error("unknown protocol: " + a.protocol);
    }

    const std::string csv = a.out_dir + "/report_" + a.protocol + ".csv";
    const std::string agg = a.out_dir + "/report_" + a.protocol + ".json";
    report.write_csv(csv);
    report.write_aggregate_json(agg);
    write_json(a.out_dir + "/eval_config.json", eval_config_json(a, s));
    std::cout << "wrote " << csv << " and " << agg << " (" << report.rows.size() << " rows)\n";
    return 0;
}

std::vector<double> parse_grid(const std::string& grid) {
    std::vector<double> out;
    if (grid.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(grid.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
            throw std::runtime_error("grid must be lo:hi:step, got " + grid);
        for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
    } else {
        std::stringstream ss(grid);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw std::runtime_error("empty sweep grid");
    return out;
}

int run_sweep(const EvalArgs& a) {
    ensure_dir(a.out_dir);
    if (a.sweep_param != "budget" && a.sweep_param != "gamma")
        throw std::runtime_error("--sweep must be budget or gamma");
    EvalSetup s = prepare_eval(a);
    const InteractionMatrix* test = s.test ? &*s.test : nullptr;

    std::string grid_spec = a.grid;
    if (grid_spec.empty()) {
        if (a.sweep_param == "gamma") {
            grid_spec = "0.05:0.95:0.10";
        } else {
            grid_spec = "1:" + std::to_string(s.config.attack.budget) + ":1";
        }
    }
    std::vector<double> grid = parse_grid(grid_spec);

    const std::string csv_path = a.out_dir + "/sweep_" + a.sweep_param + ".csv";
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    csv << "dataset,protocol,param,value,attack,K,mean_hn,mean_phn,rows\n";
    for (double value : grid) {
        EvalConfig point = s.config;
        if (a.sweep_param == "budget")
            point.attack.budget = static_cast<std::uint32_t>(std::llround(value));
        else
            point.attack.gamma = value;
        ExperimentReport report =
            experiment_whitebox(s.model, s.R, test, s.methods, s.items, point);
        for (AttackMethod m : s.methods) {
            for (std::uint32_t k : point.ks) {
                std::size_t rows = 0;
                for (const auto& r : report.rows)
                    if (r.attack == to_string(m) && r.k == k) ++rows;
                csv << point.dataset_label << ",whitebox," << a.sweep_param << "," << value
                    << "," << to_string(m) << "," << k << "," << report.mean_hn(to_string(m), k)
                    << "," << report.mean_phn(to_string(m), k) << "," << rows << "\n";
            }
        }
    }
    if (!csv) throw std::runtime_error("write failed: " + csv_path);
    csv.close();

    nlohmann::json rc = eval_config_json(a, s);
    rc["sweep"] = a.sweep_param;
    rc["grid"] = grid_spec;
    write_json(a.out_dir + "/sweep_config.json", rc);
    std::cout << "wrote " << csv_path << " (" << grid.size() << " grid points)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// gendata
// ---------------------------------------------------------------------------

struct GenArgs {
    std::string out_train;
    std::string out_test;
    std::string out_dir = default_out_dir();
    std::uint32_t users = 1500;
    std::uint32_t items = 2000;
    std::uint32_t min_degree = 12;
    std::uint32_t max_degree = 36;
    double zipf = 0.85;
    double cross = 0.02;
    double holdout = 0.2;
    std::uint64_t seed = 1;
};

int run_gendata(const GenArgs& a) {
    ensure_dir(a.out_dir);
    const std::string out_train = a.out_train.empty() ? a.out_dir + "/train.txt" : a.out_train;
    const std::string out_test = a.out_test.empty() ? a.out_dir + "/test.txt" : a.out_test;
    TwoCommunityParams p;
    p.users = a.users;
    p.items = a.items;
    p.min_user_degree = a.min_degree;
    p.max_user_degree = a.max_degree;
    p.zipf_exponent = a.zipf;
    p.cross_noise = a.cross;
    p.holdout_fraction = a.holdout;
    SplitDataset data = two_community(p, a.seed);
    data.train.save(out_train);
    data.test.save(out_test);
    std::cout << "wrote " << out_train << " (" << data.train.num_entries() << " edges) and "
              << out_test << " (" << data.test.num_entries() << " edges)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph collaborative filtering trainer and item-promotion attack harness"};
    app.require_subcommand(1);

    std::string config_file;  // handled by merge_config_args; declared so it parses

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train embeddings on an interaction file");
    train_cmd->add_option("--config", config_file, "JSON file with default option values");
    train_cmd->add_option("--data", train_args.data, "training interactions")->required();
    train_cmd->add_option("--out", train_args.out, "checkpoint path");
    train_cmd->add_option("--log", train_args.log, "epoch CSV log path");
    train_cmd->add_option("--out-dir", train_args.out_dir, "default output directory");
    train_cmd->add_option("--layers", train_args.layers, "propagation layers");
    train_cmd->add_option("--dim", train_args.dim, "embedding dimension")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
    train_cmd->add_option("--seed", train_args.seed, "rng seed");
    train_cmd->add_option("--lr", train_args.lr, "learning rate")->check(CLI::PositiveNumber);
    train_cmd->add_option("--l2", train_args.l2, "l2 regularization")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--batch", train_args.batch, "batch size")
        ->check(CLI::PositiveNumber);

    AttackArgs attack_args;
    auto* attack_cmd = app.add_subcommand("attack", "craft a promotion perturbation");
    attack_cmd->add_option("--config", config_file, "JSON file with default option values");
    attack_cmd->add_option("--model", attack_args.model, "model checkpoint")->required();
    attack_cmd->add_option("--data", attack_args.data, "training interactions")->required();
    attack_cmd
        ->add_option("--method", attack_args.method,
                     "proposed | randfilter | iufilter | rufilter")
        ->check(CLI::IsMember({"proposed", "randfilter", "iufilter", "rufilter"}));
    attack_cmd->add_option("--target", attack_args.target, "target item index")->required();
    attack_cmd->add_option("--budget", attack_args.budget, "max edge additions")
        ->required()
        ->check(CLI::PositiveNumber);
    attack_cmd->add_option("--lambda", attack_args.lambda, "objective balance in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    attack_cmd->add_option("--gamma", attack_args.gamma, "mask threshold in [0,1)")
        ->check(CLI::Range(0.0, 1.0));
    attack_cmd->add_option("--objective-k", attack_args.objective_k,
                           "list length inside the objective");
    attack_cmd->add_option("--fallback-pool", attack_args.fallback_pool,
                           "mask fallback pool size (0 = max(budget, 100))");
    attack_cmd->add_option("--seed", attack_args.seed, "seed for the random baseline");
    attack_cmd->add_option("--out", attack_args.out, "perturbation JSON path");
    attack_cmd->add_option("--saliency", attack_args.saliency,
                           "optional saliency CSV dump (proposed only)");
    attack_cmd->add_option("--out-dir", attack_args.out_dir, "default output directory");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "run an evaluation protocol");
    EvalArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep over budget or gamma");
    for (auto [cmd, args] : {std::pair{eval_cmd, &eval_args}, std::pair{sweep_cmd, &sweep_args}}) {
        cmd->add_option("--config", config_file, "JSON file with default option values");
        cmd->add_option("--model", args->model, "model checkpoint")->required();
        cmd->add_option("--data", args->data, "training interactions")->required();
        cmd->add_option("--test", args->test, "held-out interactions for quality metrics");
        cmd->add_option("--method", args->methods,
                        "attack methods (repeatable; 'all' expands to every method)");
        cmd->add_option("--item-set", args->item_set, "target percentile (e.g. 10, 30, 50)");
        cmd->add_option("--budget-variant", args->budget_variant, "1 or 2")
            ->check(CLI::Range(1, 2));
        cmd->add_option("--budget", args->budget, "explicit budget override");
        cmd->add_option("--k", args->ks, "report cutoffs (repeatable)");
        cmd->add_option("--num-items", args->num_items, "sampled target items per set");
        cmd->add_option("--target", args->targets, "explicit target items (repeatable)");
        cmd->add_option("--seed", args->seed, "harness seed");
        cmd->add_option("--threads", args->threads, "worker threads")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--lambda", args->lambda, "objective balance")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--gamma", args->gamma, "mask threshold")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--objective-k", args->objective_k, "list length in the objective");
        cmd->add_option("--fallback-pool", args->fallback_pool, "mask fallback pool size");
        cmd->add_option("--dataset-label", args->dataset_label, "label in reports");
        cmd->add_option("--out-dir", args->out_dir, "output directory");
    }
    eval_cmd->add_option("--protocol", eval_args.protocol, "whitebox | blackbox | retrain")
        ->check(CLI::IsMember({"whitebox", "blackbox", "retrain"}));
    eval_cmd->add_option("--victims", eval_args.victims,
                         "blackbox victim specs L:d:epochs:seed (repeatable)");
    eval_cmd->add_option("--retrain-epochs", eval_args.retrain_epochs,
                         "override epochs for retraining");
    sweep_cmd->add_option("--sweep", sweep_args.sweep_param, "budget | gamma")->required();
    sweep_cmd->add_option("--grid", sweep_args.grid, "comma list or lo:hi:step");

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gendata", "generate a two-community synthetic dataset");
    gen_cmd->add_option("--config", config_file, "JSON file with default option values");
    gen_cmd->add_option("--users", gen_args.users, "user count")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--items", gen_args.items, "item count")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--min-degree", gen_args.min_degree, "min interactions per user");
    gen_cmd->add_option("--max-degree", gen_args.max_degree, "max interactions per user");
    gen_cmd->add_option("--zipf", gen_args.zipf, "item popularity exponent");
    gen_cmd->add_option("--cross", gen_args.cross, "cross-community noise rate");
    gen_cmd->add_option("--holdout", gen_args.holdout, "held-out fraction per user");
    gen_cmd->add_option("--seed", gen_args.seed, "rng seed");
    gen_cmd->add_option("--out-train", gen_args.out_train, "train file path");
    gen_cmd->add_option("--out-test", gen_args.out_test, "test file path");
    gen_cmd->add_option("--out-dir", gen_args.out_dir, "default output directory");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        std::vector<std::string> merged = merge_config_args(args);
        std::reverse(merged.begin(), merged.end());  // CLI11 takes a reversed vector
        app.parse(merged);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (train_cmd->parsed()) return run_train(train_args);
        if (attack_cmd->parsed()) return run_attack_cmd(attack_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (sweep_cmd->parsed()) return run_sweep(sweep_args);
        if (gen_cmd->parsed()) return run_gendata(gen_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
