#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tg/commands.hpp"
#include "tg/error.hpp"

namespace {

void add_data_options(CLI::App* cmd, tg::DataOptions& d) {
    cmd->add_option("--data", d.path, "event CSV: src,dst,t[,t_end][,weight]")->required();
    cmd->add_flag("--header,!--no-header", d.has_header, "first row is a header (default on)");
    cmd->add_flag("--t-end", d.has_t_end, "rows carry a t_end column");
    cmd->add_flag("--weight", d.has_weight, "rows carry a weight column");
}

void add_split_options(CLI::App* cmd, tg::SplitSpec& s) {
    cmd->add_option("--train-frac", s.train, "chronological train fraction (default 0.70)");
    cmd->add_option("--val-frac", s.val, "validation fraction (default 0.15)");
    cmd->add_option("--test-frac", s.test, "test fraction (default 0.15)");
}

void add_train_options(CLI::App* cmd, tg::TrainConfig& t, std::string& mode_name) {
    cmd->add_option("--epochs", t.max_epochs, "max training epochs (default 200)");
    cmd->add_option("--patience", t.patience, "early-stopping patience (default 20)");
    cmd->add_option("--tolerance", t.tolerance, "min val MRR improvement (default 1e-5)");
    cmd->add_option("--lr", t.learning_rate, "learning rate (default 0.001)");
    cmd->add_option("--train-mode", mode_name, "per-snapshot|accumulated (default per-snapshot)");
    cmd->add_option("--train-negatives", t.train_negatives,
                    "random negatives per positive per epoch (default 1)");
    cmd->add_option("--val-q", t.val_q, "negatives per validation positive (default auto)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal graph toolkit: discretization, EdgeBank baselines, "
                 "streaming MRR evaluation, per-snapshot training"};
    app.require_subcommand(1);
    std::function<nlohmann::ordered_json()> action;

    tg::StatsOptions stats_opts;
    auto* stats = app.add_subcommand("stats", "dataset statistics as JSON");
    add_data_options(stats, stats_opts.data);
    add_split_options(stats, stats_opts.split);
    stats->add_option("--granularity", stats_opts.granularity,
                      "second|minute|hour|day|week|month|auto (default auto)");
    stats->add_option("--out", stats_opts.out, "also write the JSON here");
    stats->callback([&] { action = [&] { return tg::cmd_stats(stats_opts); }; });

    tg::DiscretizeOptions disc_opts;
    bool auto_finest = false;
    auto* disc = app.add_subcommand("discretize", "induce snapshots, emit JSONL manifest");
    add_data_options(disc, disc_opts.data);
    disc->add_option("--granularity", disc_opts.granularity, "named interval width");
    disc->add_option("--count", disc_opts.count, "target snapshot count instead of a width");
    disc->add_flag("--auto-finest", auto_finest, "pick the finest gapless named granularity");
    disc->add_option("--out", disc_opts.out, "manifest path (default stdout)");
    disc->callback([&] {
        action = [&] {
            if (auto_finest) disc_opts.granularity = "auto";
            return tg::cmd_discretize(disc_opts);
        };
    });

    tg::GenNegativesOptions neg_opts;
    auto* negs = app.add_subcommand("gen-negatives", "fixed negatives for the test split");
    add_data_options(negs, neg_opts.data);
    add_split_options(negs, neg_opts.split);
    negs->add_option("--q", neg_opts.q, "negatives per positive (default min(1000, nodes-1))");
    negs->add_option("--seed", neg_opts.seed, "sampling seed (default 0)");
    negs->add_flag("--global-history", neg_opts.global_history,
                   "draw historical negatives from all train pairs, not per source");
    negs->add_option("--out", neg_opts.out, "negatives JSONL path")->required();
    negs->callback([&] { action = [&] { return tg::cmd_gen_negatives(neg_opts); }; });

    tg::TrainOptions train_opts;
    std::string train_mode = "per-snapshot";
    auto* train = app.add_subcommand("train", "fit the logistic scorer, emit a report");
    add_data_options(train, train_opts.data);
    add_split_options(train, train_opts.split);
    train->add_option("--granularity", train_opts.granularity, "snapshot width (default auto)");
    train->add_option("--count", train_opts.snapshot_count, "snapshot count instead of a width");
    add_train_options(train, train_opts.train, train_mode);
    train->add_option("--seed", train_opts.train.seed, "training seed (default 0)");
    train->add_option("--out", train_opts.out, "report JSON path");
    train->callback([&] {
        action = [&] {
            train_opts.train.mode = tg::train_mode_from_name(train_mode);
            return tg::cmd_train(train_opts);
        };
    });

    tg::EvalOptions eval_opts;
    auto* eval = app.add_subcommand("eval", "evaluate one model on the test split");
    add_data_options(eval, eval_opts.data);
    add_split_options(eval, eval_opts.split);
    eval->add_option("--model", eval_opts.model, "edgebank-inf|edgebank-tw|logistic");
    eval->add_option("--mode", eval_opts.mode, "streaming|deployed (default streaming)");
    eval->add_option("--tie-policy", eval_opts.tie_policy,
                     "pessimistic|optimistic|mean (default pessimistic)");
    eval->add_option("--q", eval_opts.q, "negatives per positive (default auto)");
    eval->add_option("--seed", eval_opts.seed, "negative sampling seed (default 0)");
    eval->add_option("--negatives", eval_opts.negatives_path, "import a negatives JSONL file");
    eval->add_option("--weights", eval_opts.weights_path, "training report JSON (logistic)");
    eval->add_option("--granularity", eval_opts.granularity, "snapshot width (logistic)");
    eval->add_option("--count", eval_opts.snapshot_count, "snapshot count (logistic)");
    eval->add_option("--tw-window", eval_opts.tw_window,
                     "edgebank-tw memory window (default test-split duration)");
    eval->add_option("--batch-size", eval_opts.batch_size, "event batch size (default 200)");
    eval->add_flag("--global-history", eval_opts.global_history,
                   "global historical negative pool");
    eval->add_option("--out", eval_opts.out, "results JSON path");
    eval->callback([&] { action = [&] { return tg::cmd_eval(eval_opts); }; });

    tg::RunOptions run_opts;
    std::string run_train_mode = "per-snapshot";
    auto* run = app.add_subcommand("run", "full pipeline into an output directory");
    add_data_options(run, run_opts.data);
    add_split_options(run, run_opts.split);
    run->add_option("--model", run_opts.model, "edgebank-inf|edgebank-tw|logistic");
    run->add_option("--mode", run_opts.mode, "streaming|deployed (default streaming)");
    run->add_option("--tie-policy", run_opts.tie_policy,
                    "pessimistic|optimistic|mean (default pessimistic)");
    run->add_option("--q", run_opts.q, "negatives per positive (default auto)");
    run->add_option("--neg-seed", run_opts.neg_seed, "negative sampling seed (default 0)");
    run->add_option("--seeds", run_opts.seeds, "run seeds (default 0)")->delimiter(',');
    run->add_option("--granularity", run_opts.granularity, "snapshot width (logistic)");
    run->add_option("--count", run_opts.snapshot_count, "snapshot count (logistic)");
    run->add_option("--tw-window", run_opts.tw_window,
                    "edgebank-tw memory window (default test-split duration)");
    run->add_option("--batch-size", run_opts.batch_size, "event batch size (default 200)");
    run->add_flag("--global-history", run_opts.global_history,
                  "global historical negative pool");
    add_train_options(run, run_opts.train, run_train_mode);
    run->add_option("--out-dir", run_opts.out_dir, "artifact directory")->required();
    run->callback([&] {
        action = [&] {
            run_opts.train.mode = tg::train_mode_from_name(run_train_mode);
            return tg::cmd_run(run_opts);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const nlohmann::ordered_json out = action();
        std::cout << out.dump(2) << std::endl;
        return 0;
    } catch (const tg::ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const tg::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
