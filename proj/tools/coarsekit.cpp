#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "coarsekit/fixtures.hpp"
#include "coarsekit/game_service.hpp"
#include "coarsekit/io.hpp"

using namespace coarsekit;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  std::string path;
  bool force = false;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw UsageError("'" + path + "' is not valid JSON");
  return j;
}

void emit(const Output& out, const std::string& text) {
  if (out.path.empty() || out.path == "-") {
    std::cout << text;
    return;
  }
  if (std::filesystem::exists(out.path) && !out.force) {
    throw UsageError("refusing to overwrite '" + out.path + "' without --force");
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + out.path + "'");
  f << text;
}

void emit(const Output& out, const json& j) { emit(out, canonical(j)); }

// A fixture name or the path of a space JSON file.
SpacePtr load_space(const std::string& ref) {
  if (fixtures::has(ref)) return fixtures::load(ref);
  return space_from_json(read_json(ref));
}

// Either a family file {"family", "spaces"} or a single space.
MetricFamily load_family(const std::string& space_ref, const std::string& family_path) {
  if (!family_path.empty()) {
    const auto j = read_json(family_path);
    SpaceRegistry reg;
    if (j.contains("spaces")) reg.load(j.at("spaces"));
    return family_from_json(j.contains("family") ? j.at("family") : j, reg);
  }
  if (space_ref.empty()) throw UsageError("one of --space or --family is required");
  return single_space_family(load_space(space_ref));
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
  }
  return out;
}

json report_json(const CertificateReport& rep) {
  return {{"valid", rep.valid}, {"violation", rep.violation}, {"message", rep.message}, {"details", rep.details}};
}

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("-o,--output", out.path, "Write the result to this file instead of stdout");
  cmd->add_flag("--force", out.force, "Allow overwriting an existing output file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarsekit: decomposition certificates on finite metric spaces"};
  app.require_subcommand(1);
  Output out;
  int status = kOk;

  // build
  std::string spec_path;
  bool summary = false;
  auto* build = app.add_subcommand("build", "Validate a space description and write it canonically");
  build->add_option("--spec", spec_path, "Space JSON (matrix, points, weighted_l1, graph, grid) or fixture name")
      ->required();
  build->add_flag("--summary", summary, "Print size, diameter and minimum gap instead of the space");
  add_output(build, out);

  // fixtures
  std::string export_name;
  auto* fix = app.add_subcommand("fixtures", "List bundled fixtures or export one as a space file");
  fix->add_option("--export", export_name, "Fixture to export");
  std::string random_kind;
  std::size_t random_points = 10, random_dim = 2;
  std::uint64_t seed = 1;
  fix->add_option("--random", random_kind, "Generate a random space instead: metric | cloud")
      ->check(CLI::IsMember({"metric", "cloud"}));
  fix->add_option("--points", random_points, "Number of points for --random")->check(CLI::PositiveNumber);
  fix->add_option("--dim", random_dim, "Coordinate dimension for --random cloud")->check(CLI::PositiveNumber);
  fix->add_option("--seed", seed, "Seed for --random");
  add_output(fix, out);

  // decompose
  std::string space_ref, family_path, cover_path, strategy_name = "net_then_grave";
  double r = 0.0, diam = kInfinity;
  std::size_t levels_n = 1;
  auto* dec = app.add_subcommand("decompose", "Produce a verified (r, n) certificate");
  dec->add_option("--space", space_ref, "Fixture name or space JSON");
  dec->add_option("--family", family_path, "Family JSON");
  dec->add_option("--cover", cover_path, "Cover JSON; runs the interior-shrinking construction with --n");
  dec->add_option("--r", r, "Scale")->required()->check(CLI::PositiveNumber);
  dec->add_option("--strategy", strategy_name, "net_then_grave | singletons | oracle_small")
      ->check(CLI::IsMember({"net_then_grave", "singletons", "oracle_small"}));
  dec->add_option("--n", levels_n, "Levels minus one (oracle_small, --cover)");
  dec->add_option("--diam", diam, "Diameter bound (oracle_small)");
  add_output(dec, out);

  // verify
  std::string cert_path, transcript_path;
  auto* ver = app.add_subcommand("verify", "Check a certificate or replay a game transcript");
  ver->add_option("--cert", cert_path, "Certificate JSON");
  ver->add_option("--transcript", transcript_path, "Game transcript JSON");
  add_output(ver, out);

  // compose
  std::string outer_path, inner_path;
  auto* comp = app.add_subcommand("compose", "Compose two chained certificates");
  comp->add_option("--outer", outer_path, "Certificate of X over Y")->required();
  comp->add_option("--inner", inner_path, "Certificate of Y over Z")->required();
  add_output(comp, out);

  // oracle
  auto* orc = app.add_subcommand("oracle", "Exhaustive decomposability check for small spaces");
  orc->add_option("--space", space_ref, "Fixture name or space JSON")->required();
  orc->add_option("--r", r, "Scale")->required()->check(CLI::PositiveNumber);
  orc->add_option("--n", levels_n, "Levels minus one")->required();
  orc->add_option("--diam", diam, "Diameter bound")->required();
  std::size_t max_points = kMaxOraclePoints;
  orc->add_option("--max-points", max_points, "Refuse spaces with more points");
  add_output(orc, out);

  // cover-stats
  std::vector<double> d_values;
  double enlarge_by = 0.0;
  auto* cst = app.add_subcommand("cover-stats", "Multiplicity, d-multiplicity and Lebesgue number of a cover");
  cst->add_option("--cover", cover_path, "Cover JSON")->required();
  cst->add_option("--d", d_values, "Radii for d-multiplicity");
  cst->add_option("--enlarge", enlarge_by, "Write the lambda-enlarged cover instead")->check(CLI::PositiveNumber);
  add_output(cst, out);

  // nerve
  bool dot = false;
  auto* nrv = app.add_subcommand("nerve", "Nerve complex of a cover");
  nrv->add_option("--cover", cover_path, "Cover JSON")->required();
  nrv->add_flag("--dot", dot, "Emit the 1-skeleton in dot format");
  add_output(nrv, out);

  // lipschitz
  double epsilon = 1.0, pull_r = 0.0;
  bool unchecked = false, with_map = false;
  auto* lip = app.add_subcommand("lipschitz", "Partition-of-unity map into the nerve and its Lipschitz constant");
  lip->add_option("--cover", cover_path, "Cover JSON")->required();
  lip->add_option("--epsilon", epsilon, "Target Lipschitz constant")->check(CLI::PositiveNumber);
  lip->add_option("--n", levels_n, "Dimension bound");
  lip->add_flag("--unchecked", unchecked, "Skip the Lebesgue precondition");
  lip->add_option("--pullback", pull_r, "Also pull back the star cover at this r")->check(CLI::PositiveNumber);
  lip->add_flag("--map", with_map, "Include the map values");
  add_output(lip, out);

  // doubling
  std::string subset_text, grid_text = "dyadic", verify_path;
  double R = 1.0, lambda = 0.0;
  bool intrinsic = false, subspace = false;
  auto* dbl = app.add_subcommand("doubling", "Certify large-scale doubling constants");
  dbl->add_option("--space", space_ref, "Fixture name or space JSON");
  dbl->add_option("--family", family_path, "Family JSON (with --asdim)");
  dbl->add_option("--subset", subset_text, "Comma-separated point ids (default: all)");
  dbl->add_option("--R", R, "Smallest scale")->check(CLI::PositiveNumber);
  dbl->add_option("--grid", grid_text, "'dyadic' or a comma-separated list of scales");
  dbl->add_flag("--intrinsic", intrinsic, "Centers and balls inside the subset");
  dbl->add_flag("--subspace", subspace, "Apply the (N^2, 2R) subspace transfer to the host certificate");
  dbl->add_option("--verify", verify_path, "Verify an existing doubling certificate");
  dbl->add_option("--asdim", lambda, "Run the net-ball cover pipeline at this lambda")->check(CLI::PositiveNumber);
  add_output(dbl, out);

  // glue
  std::string weights_path, parts_path;
  double glue_R = 1.0;
  std::string s_grid_text;
  auto* glu = app.add_subcommand("glue", "Glue per-part feature maps with a partition of unity");
  glu->add_option("--cert", cert_path, "Certificate whose parts (all levels, first member) are the U_j");
  glu->add_option("--cover", cover_path, "Cover whose elements are the U_j");
  glu->add_option("--weights", weights_path, "{\"weights\": [[phi_j per domain point]]}; default distance weights");
  glu->add_option("--parts", parts_path, "JSON array of feature maps, one per U_j")->required();
  glu->add_option("--R", glue_R, "Closeness scale")->check(CLI::PositiveNumber);
  glu->add_option("--epsilon", epsilon, "Variation bound")->check(CLI::PositiveNumber);
  glu->add_option("--S", s_grid_text, "Comma-separated decay profile distances");
  glu->add_flag("--map", with_map, "Include the glued feature map");
  add_output(glu, out);

  // game
  double bound = 0.0;
  std::string script_text, load_path;
  std::size_t max_turns = kDefaultMaxTurns;
  auto* gam = app.add_subcommand("game", "Play a scripted decomposition game");
  gam->add_option("--space", space_ref, "Fixture name or space JSON");
  gam->add_option("--family", family_path, "Family JSON");
  gam->add_option("--load", load_path, "Continue a saved transcript");
  gam->add_option("--bound", bound, "Mesh bound B");
  gam->add_option("--strategy", strategy_name, "Defender strategy")
      ->check(CLI::IsMember({"net_then_grave", "singletons", "oracle_small"}));
  gam->add_option("--script", script_text, "Comma-separated challenge scales")->required();
  gam->add_option("--max-turns", max_turns, "Turn cap")->check(CLI::PositiveNumber);
  add_output(gam, out);

  // serve
  std::string host = "127.0.0.1", fixture_dir;
  int port = 8080;
  auto* srv = app.add_subcommand("serve", "Run the HTTP game service");
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--port", port, "Port");
  srv->add_option("--fixtures", fixture_dir, "Directory of extra <name>.json space fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << canonical({{"code", "UsageError"}, {"message", e.what()}});
    return kUsage;
  }

  try {
    if (*build) {
      const auto space = load_space(spec_path);
      if (summary) {
        emit(out, json{{"id", space->id()},
                       {"points", space->size()},
                       {"diameter", space->diameter()},
                       {"min_positive_distance", number_to_json(space->min_positive_distance())}});
      } else {
        emit(out, space_to_json(*space));
      }
    } else if (*fix) {
      if (!random_kind.empty()) {
        std::mt19937_64 rng(seed);
        const auto id = "random_" + random_kind + std::to_string(random_points) + "_s" + std::to_string(seed);
        const auto space = random_kind == "metric" ? fixtures::random_metric(random_points, rng, 6, id)
                                                   : fixtures::random_cloud(random_points, random_dim, rng, Norm::L2, id);
        emit(out, space_to_json(*space));
      } else if (!export_name.empty()) {
        if (!fixtures::has(export_name)) throw UsageError("unknown fixture '" + export_name + "'");
        emit(out, space_to_json(*fixtures::load(export_name)));
      } else {
        json list = json::array();
        for (const auto& name : fixtures::names()) {
          const auto s = fixtures::load(name);
          list.push_back({{"name", name}, {"points", s->size()}, {"diameter", s->diameter()}});
        }
        emit(out, json{{"fixtures", list}});
      }
    } else if (*dec) {
      DecompositionCertificate cert;
      if (!cover_path.empty()) {
        cert = grave_construct(cover_from_json(read_json(cover_path)), r, levels_n);
      } else {
        DefendOptions opt;
        opt.n = levels_n;
        opt.diameter_bound = diam;
        cert = defend(load_family(space_ref, family_path), r, parse_strategy(strategy_name), opt);
      }
      emit(out, certificate_to_json(cert));
    } else if (*ver) {
      if (cert_path.empty() == transcript_path.empty()) throw UsageError("give exactly one of --cert, --transcript");
      if (!cert_path.empty()) {
        const auto rep = verify_certificate(certificate_from_json(read_json(cert_path)));
        emit(out, report_json(rep));
        status = rep.valid ? kOk : kFailed;
      } else {
        const auto session = session_from_json(read_json(transcript_path));
        json turns = json::array();
        bool ok = true;
        for (std::size_t k = 0; k < session.turns.size(); ++k) {
          const auto& t = session.turns[k];
          auto rep = verify_certificate(t.certificate);
          const auto& prev = k == 0 ? session.initial : session.turns[k - 1].certificate.target;
          bool chained = prev.members.size() == t.certificate.source.members.size();
          for (std::size_t i = 0; chained && i < prev.members.size(); ++i) {
            chained = same_subspace(prev.members[i], t.certificate.source.members[i]);
          }
          const bool scale_ok = tol::geq(t.certificate.r, t.r);
          ok = ok && rep.valid && chained && scale_ok;
          turns.push_back({{"turn", k}, {"valid", rep.valid}, {"chained", chained}, {"scale_ok", scale_ok},
                           {"message", rep.message}});
        }
        json result = {{"turns", turns}};
        if (!session.turns.empty() && ok) {
          const auto replay = replay_transcript(session);
          ok = replay.valid;
          result["replay"] = {{"valid", replay.valid}, {"r", replay.r}, {"n", replay.n},
                              {"expected_n", replay.expected_n}, {"target_mesh", replay.target_mesh},
                              {"message", replay.message}};
          if (session.status == GameStatus::DefenderWon) ok = ok && tol::leq(replay.target_mesh, session.bound);
        }
        result["valid"] = ok;
        emit(out, result);
        status = ok ? kOk : kFailed;
      }
    } else if (*comp) {
      const auto outer = certificate_from_json(read_json(outer_path));
      const auto inner = certificate_from_json(read_json(inner_path));
      emit(out, certificate_to_json(compose_certificates(outer, inner)));
    } else if (*orc) {
      const auto space = load_space(space_ref);
      const auto verdict = exhaustive_decompose(whole_space(space), r, levels_n, diam, max_points);
      json j = {{"decomposable", verdict.decomposable},
                {"min_worst_diameter", number_to_json(verdict.min_worst_diameter)},
                {"r", r},
                {"n", levels_n},
                {"diam", number_to_json(diam)}};
      if (verdict.witness) j["witness"] = certificate_to_json(*verdict.witness);
      emit(out, j);
    } else if (*cst) {
      const auto cover = cover_from_json(read_json(cover_path));
      if (enlarge_by > 0.0) {
        emit(out, cover_to_json(enlarge(cover, enlarge_by)));
      } else {
        json dm = json::object();
        for (double d : d_values) {
          std::ostringstream key;
          key << d;
          dm[key.str()] = d_multiplicity(cover, d);
        }
        emit(out, json{{"elements", cover.elements.size()},
                       {"multiplicity", multiplicity(cover)},
                       {"lebesgue", number_to_json(lebesgue_number(cover))},
                       {"d_multiplicity", dm}});
      }
    } else if (*nrv) {
      const auto complex = nerve_of_cover(cover_from_json(read_json(cover_path)));
      if (dot) {
        emit(out, to_dot(complex));
      } else {
        emit(out, complex_to_json(complex));
      }
    } else if (*lip) {
      const auto cover = cover_from_json(read_json(cover_path));
      const auto map = unchecked ? partition_of_unity_map_unchecked(cover)
                                 : partition_of_unity_map(cover, epsilon, levels_n);
      const auto rep = measure_lipschitz(map);
      json j = {{"lipschitz", rep.constant},
                {"worst_pair", {rep.p, rep.q}},
                {"epsilon", epsilon},
                {"required_lebesgue", required_lebesgue(epsilon, levels_n)},
                {"lebesgue", number_to_json(lebesgue_number(cover))},
                {"multiplicity", multiplicity(cover)},
                {"pass", tol::leq(rep.constant, epsilon)}};
      if (pull_r > 0.0) {
        const auto pb = pullback_star_cover(map, pull_r, levels_n);
        j["pullback"] = {{"multiplicity", pb.multiplicity},
                         {"lebesgue", number_to_json(pb.lebesgue)},
                         {"cover", cover_to_json(pb.cover)}};
      }
      if (with_map) j["map"] = complex_map_to_json(map);
      emit(out, j);
      status = j["pass"].get<bool>() ? kOk : kFailed;
    } else if (*dbl) {
      if (!verify_path.empty()) {
        const auto rep = verify_doubling(doubling_from_json(read_json(verify_path)));
        emit(out, json{{"valid", rep.valid}, {"message", rep.message}, {"details", rep.details}});
        status = rep.valid ? kOk : kFailed;
      } else if (lambda > 0.0) {
        const auto family = load_family(space_ref, family_path);
        std::vector<DoublingCertificate> certs;
        for (const auto& m : family.members) {
          const auto grid = grid_text == "dyadic" ? dyadic_grid(R, std::max(R, diameter(m))) : parse_list(grid_text);
          certs.push_back(certify_doubling(m.space, m.points, R, grid, true));
        }
        const auto rep = doubling_to_asdim_cover(family, certs, lambda);
        json covers = json::array();
        for (const auto& nc : rep.covers) {
          covers.push_back({{"net", nc.net}, {"multiplicity", nc.multiplicity},
                            {"lebesgue", number_to_json(nc.lebesgue)}, {"elements", nc.cover.elements.size()}});
        }
        emit(out, json{{"N", rep.N}, {"R", rep.R}, {"lambda", rep.lambda}, {"scale", rep.scale},
                       {"bound", rep.bound}, {"max_multiplicity", rep.max_multiplicity},
                       {"min_lebesgue", number_to_json(rep.min_lebesgue)}, {"covers", covers},
                       {"certificate", certificate_to_json(rep.certificate)}});
      } else {
        const auto space = load_space(space_ref);
        PointSet subset = space->all_points();
        if (!subset_text.empty()) {
          std::vector<PointId> ids;
          for (double v : parse_list(subset_text)) ids.push_back(PointId(v));
          subset = make_point_set(std::move(ids));
        }
        const auto grid = grid_text == "dyadic" ? dyadic_grid(R, std::max(R, space->diameter())) : parse_list(grid_text);
        auto cert = certify_doubling(space, subset, R, grid, intrinsic && !subspace);
        if (subspace) cert = subspace_doubling(cert);
        emit(out, doubling_to_json(cert));
      }
    } else if (*glu) {
      if (cert_path.empty() == cover_path.empty()) throw UsageError("give exactly one of --cert, --cover");
      GlueInput in;
      if (!cover_path.empty()) {
        const auto cover = cover_from_json(read_json(cover_path));
        in.domain = cover.domain;
        in.parts = cover.elements;
      } else {
        const auto cert = certificate_from_json(read_json(cert_path));
        if (cert.source.members.empty()) throw UsageError("certificate has no members");
        in.domain = cert.source.members.front();
        std::set<PointSet> parts;
        for (const auto& level : cert.members.front().levels) parts.insert(level.begin(), level.end());
        in.parts.assign(parts.begin(), parts.end());
      }
      in.weights = weights_path.empty() ? distance_weights(in.domain, in.parts)
                                        : read_json(weights_path).at("weights").get<std::vector<std::vector<double>>>();
      for (const auto& fm : read_json(parts_path)) in.xis.push_back(feature_map_from_json(fm));
      in.R = glue_R;
      in.epsilon = epsilon;
      in.S_grid = parse_list(s_grid_text);
      const auto res = glue_embeddings(in);
      json profile = json::array();
      for (const auto& [S, v] : res.profile) profile.push_back({S, v});
      json j = {{"max_norm_error", res.max_norm_error},
                {"max_variation", res.max_variation},
                {"max_weight_variation", res.max_weight_variation},
                {"norm_ok", res.norm_ok},
                {"variation_ok", res.variation_ok},
                {"profile", profile},
                {"dim", res.eta.dim}};
      if (with_map) j["map"] = feature_map_to_json(res.eta);
      emit(out, j);
      status = res.norm_ok && res.variation_ok ? kOk : kFailed;
    } else if (*gam) {
      GameSession session;
      if (!load_path.empty()) {
        session = session_from_json(read_json(load_path));
      } else {
        session = start_session(load_family(space_ref, family_path), bound, parse_strategy(strategy_name), max_turns);
        session.id = 1;
      }
      run_script(session, parse_list(script_text));
      emit(out, session_to_json(session));
    } else if (*srv) {
      static GameService* running = nullptr;
      GameService service(fixture_dir);
      running = &service;
      std::signal(SIGINT, [](int) {
        if (running) running->stop();
      });
      std::signal(SIGTERM, [](int) {
        if (running) running->stop();
      });
      std::cerr << "serving on " << host << ":" << port << "\n";
      if (!service.serve(host, port)) throw UsageError("cannot bind " + host + ":" + std::to_string(port));
    }
  } catch (const UsageError& e) {
    std::cerr << canonical({{"code", "UsageError"}, {"message", e.what()}});
    return kUsage;
  } catch (const Error& e) {
    std::cerr << canonical(error_to_json(e));
    return e.code() == ErrorCode::InvalidInput ? kUsage : kFailed;
  } catch (const json::exception& e) {
    std::cerr << canonical({{"code", "InvalidInput"}, {"message", e.what()}});
    return kUsage;
  }
  return status;
}
