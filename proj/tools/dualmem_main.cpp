/*
 * dualmem: reproducible benchmark runner for the three conversational
 * memory architectures.
 *
 * Exit codes: 0 success, 1 configuration error, 2 backend error.
 */
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualmem/dualmem.hpp"

namespace {

dualmem::RunConfig base_config;
std::vector<std::string> arch_flags;
std::string backend_flag = "scripted";
std::string replay_snapshot;

void apply_common(CLI::App* cmd, bool with_scales = true) {
    if (with_scales)
        cmd->add_option("--scales", base_config.scales, "Scale schedule (message counts)")
            ->delimiter(',');
    cmd->add_option("--seeds", base_config.seeds, "Conversation seeds per scale");
    cmd->add_option("--probes", base_config.probes, "Probe questions per seed");
    cmd->add_option("--arch", arch_flags, "Architectures: dp, rag, fc (repeatable)");
    cmd->add_option("--backend", backend_flag, "Backend kind: scripted or http");
    cmd->add_option("--cadence", base_config.cadence_messages,
                    "Messages between consolidations (1 = every exchange)");
    cmd->add_option("--window", base_config.window, "Episodic window size W");
    cmd->add_option("--topk", base_config.top_k, "Chunks retrieved per RAG query");
    cmd->add_option("--seed", base_config.seed, "Master seed");
    cmd->add_option("--messages", base_config.total_messages, "Conversation length T");
    cmd->add_option("--filler-tokens", base_config.filler_tokens,
                    "Exact tokens per capacity filler message (0 = natural)");
    cmd->add_option("--preamble", base_config.preamble, "System preamble text");
    cmd->add_option("--endpoint", base_config.endpoint, "HTTP backend base URL");
    cmd->add_option("--model", base_config.model, "Model identifier");
    cmd->add_option("--out", base_config.out_dir, "Results directory")->required();
}

dualmem::RunConfig finalize(const std::string& command) {
    dualmem::RunConfig c = base_config;
    c.command = command;
    if (!arch_flags.empty()) {
        c.architectures.clear();
        for (const auto& a : arch_flags) {
            if (a == "dp")
                c.architectures.push_back(dualmem::Architecture::dual_process);
            else if (a == "rag")
                c.architectures.push_back(dualmem::Architecture::rag);
            else if (a == "fc")
                c.architectures.push_back(dualmem::Architecture::full_context);
            else
                throw dualmem::ConfigError("unknown --arch value: " + a + " (expected dp, rag or fc)");
        }
    }
    if (backend_flag == "scripted")
        c.backend = dualmem::BackendKind::scripted;
    else if (backend_flag == "http")
        c.backend = dualmem::BackendKind::http_openai_compatible;
    else
        throw dualmem::ConfigError("unknown --backend value: " + backend_flag);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversational-memory benchmark harness"};
    app.require_subcommand(1);

    auto* capacity = app.add_subcommand("capacity", "Synthetic capacity scaling (placed facts)");
    apply_common(capacity);
    auto* realistic = app.add_subcommand("realistic", "Realistic simulation sweep");
    apply_common(realistic);
    auto* honest = app.add_subcommand("honest120", "120-query six-type comparison");
    apply_common(honest, false);
    auto* ablation =
        app.add_subcommand("consolidation-ablation", "Consolidator strategy comparison");
    apply_common(ablation, false);
    auto* cost = app.add_subcommand("cost", "Economic model under the assumption ledger");
    apply_common(cost, false);
    auto* replay = app.add_subcommand("replay", "Re-run a results directory from its snapshot");
    replay->add_option("--snapshot", replay_snapshot, "Path to config.snapshot")->required();
    replay->add_option("--out", base_config.out_dir, "Results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::filesystem::path dir;
        if (replay->parsed()) {
            dir = dualmem::cmd_replay(replay_snapshot, base_config.out_dir);
        } else {
            std::string command;
            if (capacity->parsed()) command = "capacity";
            if (realistic->parsed()) command = "realistic";
            if (honest->parsed()) command = "honest120";
            if (ablation->parsed()) command = "consolidation-ablation";
            if (cost->parsed()) command = "cost";
            dir = dualmem::run_command(finalize(command));
        }
        std::cout << "results: " << dir.string() << "\n";
        return 0;
    } catch (const dualmem::BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 2;
    } catch (const dualmem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
