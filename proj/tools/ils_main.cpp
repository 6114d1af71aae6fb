// ils -- command-line front end for the knowledge-thread engine.
//
// Subcommands: validate, combine, query, export-dot. Exit codes: 0 success,
// 1 any invalid thread (validate), 2 parse or usage errors.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ils/ils.hpp"

namespace {

int run_validate(const std::string& file) {
  const std::string text = ils::read_file(file);
  const auto blocks = ils::parse_thread_blocks(text);
  bool any_invalid = false;
  for (const ils::RawThreadBlock& block : blocks) {
    try {
      ils::validate_block(block);
      std::cout << block.id << ": valid\n";
    } catch (const ils::IlsError& err) {
      any_invalid = true;
      std::cout << block.id << ": " << ils::to_string(err.code()) << ": "
                << err.message() << "\n";
    }
  }
  return any_invalid ? 1 : 0;
}

struct CombineArgs {
  std::string file1;
  std::string file2;
  std::string constraints_file;
  std::string out_file;
  double decay = ils::kDefaultDecay;
  std::size_t max_len = 4;
  double min_score = 0.0;
  std::size_t cap = 100000;
  bool explain = false;
};

int run_combine(const CombineArgs& args) {
  const std::vector<ils::Csd> left =
      ils::parse_thread_file(ils::read_file(args.file1), args.decay);
  const std::vector<ils::Csd> right =
      ils::parse_thread_file(ils::read_file(args.file2), args.decay);
  ils::ConstraintSet constraints;
  if (!args.constraints_file.empty()) {
    constraints = ils::parse_constraint_file(ils::read_file(args.constraints_file));
  }

  ils::ExtractOptions extract_options;
  extract_options.max_path_edges = args.max_len;
  extract_options.candidate_cap = args.cap;
  extract_options.derived_decay = args.decay;

  std::vector<ils::CandidateCsd> classified;
  for (const ils::Csd& kt1 : left) {
    for (const ils::Csd& kt2 : right) {
      const ils::ProductCluster cluster = ils::tensor_product(kt1, kt2);
      for (ils::CandidateCsd& candidate :
           ils::extract_candidates(cluster, extract_options)) {
        classified.push_back(
            ils::classify(std::move(candidate), constraints, args.min_score));
      }
    }
  }
  const ils::CandidateSet set = ils::sieve(std::move(classified));
  const std::vector<ils::Csd> derived = ils::derived_threads(set);
  ils::write_file(args.out_file, ils::serialize(derived));

  std::cout << "valid=" << set.valid.size() << " rejected=" << set.rejected.size()
            << "\n";
  if (args.explain) {
    for (const ils::CandidateCsd& candidate : set.rejected) {
      std::cout << ils::to_string(candidate.verdict) << "\t";
      bool first = true;
      for (const ils::ConceptId& id : candidate.concept_trace) {
        if (!first) std::cout << ";";
        first = false;
        std::cout << id.str();
      }
      std::cout << "\n";
    }
  }
  return 0;
}

int run_query(const std::string& store_path, const std::string& label,
              std::size_t top_k) {
  const ils::ThreadStore store = ils::load_store(store_path);
  for (const ils::QueryResult& result : store.query(label, top_k)) {
    std::printf("%.6f\t%s\t%s\n", result.score, result.thread->id().c_str(),
                result.anchor.str().c_str());
  }
  return 0;
}

int run_export_dot(const std::string& file, const std::string& thread_id,
                   const std::string& out_file) {
  const std::vector<ils::Csd> threads =
      ils::parse_thread_file(ils::read_file(file));
  const ils::Csd* selected = nullptr;
  if (!thread_id.empty()) {
    for (const ils::Csd& thread : threads) {
      if (thread.id() == thread_id) selected = &thread;
    }
    if (!selected) {
      throw ils::IlsError(ils::ErrorCode::usage_error,
                          "no thread '" + thread_id + "' in '" + file + "'");
    }
  } else if (threads.size() == 1) {
    selected = &threads.front();
  } else {
    throw ils::IlsError(ils::ErrorCode::usage_error,
                        "file holds " + std::to_string(threads.size()) +
                            " threads; pick one with --thread");
  }
  ils::write_file(out_file, ils::export_dot(*selected));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-thread engine: validate, combine, query, export"};
  app.require_subcommand(1);

  std::string validate_file;
  CLI::App* validate = app.add_subcommand(
      "validate", "check every thread block of an ILT file");
  validate->add_option("file", validate_file, "ILT file")->required();

  CombineArgs combine_args;
  CLI::App* combine = app.add_subcommand(
      "combine", "tensor-combine two thread files and sieve the candidates");
  combine->add_option("file1", combine_args.file1, "left ILT file")->required();
  combine->add_option("file2", combine_args.file2, "right ILT file")->required();
  combine->add_option("--constraints", combine_args.constraints_file,
                      "ILC file with incompatible label pairs");
  combine->add_option("--decay", combine_args.decay,
                      "node weight decay in (0,1)")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  combine->add_option("--max-len", combine_args.max_len,
                      "maximum candidate path edges")
      ->check(CLI::PositiveNumber);
  combine->add_option("--min-score", combine_args.min_score,
                      "reject candidates scoring below this")
      ->check(CLI::NonNegativeNumber);
  combine->add_option("--cap", combine_args.cap, "candidate budget")
      ->check(CLI::PositiveNumber);
  combine->add_option("-o,--output", combine_args.out_file,
                      "output ILT file for valid derived threads")
      ->required();
  combine->add_flag("--explain", combine_args.explain,
                    "print verdict and trace for every rejected candidate");

  std::string query_store;
  std::string query_label;
  std::size_t query_top = 10;
  CLI::App* query = app.add_subcommand(
      "query", "rank threads containing a concept label");
  query->add_option("store", query_store, "ILT file or directory of .ilt files")
      ->required();
  query->add_option("--concept", query_label, "concept label to look up")
      ->required();
  query->add_option("--top", query_top, "maximum results")
      ->check(CLI::PositiveNumber);

  std::string dot_file;
  std::string dot_thread;
  std::string dot_out;
  CLI::App* export_dot = app.add_subcommand(
      "export-dot", "write a DOT rendering of one thread");
  export_dot->add_option("file", dot_file, "ILT file")->required();
  export_dot->add_option("--thread", dot_thread, "thread id to export");
  export_dot->add_option("-o,--output", dot_out, "output DOT file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& err) {
    std::cerr << "ils: " << err.what() << "\n";
    return 2;
  }

  try {
    if (*validate) return run_validate(validate_file);
    if (*combine) return run_combine(combine_args);
    if (*query) return run_query(query_store, query_label, query_top);
    if (*export_dot) return run_export_dot(dot_file, dot_thread, dot_out);
  } catch (const ils::IlsError& err) {
    std::cerr << "ils: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "ils: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
