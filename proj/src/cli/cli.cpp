#include "pano/cli/cli.hpp"

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "pano/agents/mock.hpp"
#include "pano/agents/remote.hpp"
#include "pano/core/error.hpp"
#include "pano/core/transform.hpp"
#include "pano/io/codec.hpp"
#include "pano/io/file.hpp"
#include "pano/io/png.hpp"
#include "pano/io/sequence.hpp"
#include "pano/service/api.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pano::cli {

namespace {

constexpr const char* kYawKey = "yaw_deg";

agents::BackendSuite mock_suite(const std::optional<fs::path>& fixtures) {
  auto suite = agents::mock_backends();
  if (fixtures) {
    suite.transcriber = std::make_shared<agents::MockTranscriber>(
        agents::MockTranscriber::from_table(*fixtures / "transcripts.json"));
  }
  return suite;
}

json projection_json(const ProjectionParams& p) {
  return {{"out_width", p.out_width},
          {"blur_sigma_frac", p.blur_sigma_frac},
          {"fg_height_frac", p.fg_height_frac},
          {"blend_band_frac", p.blend_band_frac}};
}

std::vector<EquirectFrame> equirect_frames(const Clip& clip) {
  std::vector<EquirectFrame> out;
  out.reserve(clip.size());
  for (const auto& f : clip.frames()) out.emplace_back(Frame(*f));
  return out;
}

Clip clip_of(std::vector<EquirectFrame> frames, int fps) {
  std::vector<Frame> raw;
  raw.reserve(frames.size());
  for (auto& f : frames) raw.push_back(f.frame());
  return Clip(std::move(raw), fps);
}

void print_seams(std::ostream& out, const Clip& clip, bool as_json) {
  json scores = json::array();
  double sum = 0;
  for (std::size_t i = 0; i < clip.size(); ++i) {
    const double s = seam_continuity(EquirectFrame(clip.frame(i)));
    sum += s;
    scores.push_back(s);
  }
  const double mean = clip.size() ? sum / clip.size() : 0.0;
  if (as_json) {
    out << json{{"frames", scores}, {"mean", mean}}.dump() << "\n";
    return;
  }
  out << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < clip.size(); ++i) out << "frame " << i << " seam " << scores[i].get<double>() << "\n";
  out << "mean seam " << mean << "\n";
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

httplib::Server* g_server = nullptr;

extern "C" void stop_server(int) {
  if (g_server) g_server->stop();
}

}  // namespace

ChainResult run_chain(const ChainOptions& options) {
  session::SessionConfig config;
  config.target_segments = options.segments;
  config.segment_duration_s = options.duration_s;
  config.fps = options.fps;
  config.seed = options.seed;
  config.projection = options.projection;

  auto s = session::Session::start("chain", options.prompt, options.image, config, mock_suite(options.fixtures));
  auto generate = [&](int k) {
    s->run_generation(k);
    const auto snap = s->snapshot();
    if (snap.segments[k].status != session::SegmentStatus::ready) {
      throw Error(Errc::backend_contract, "segment " + std::to_string(k) + " failed: " + snap.segments[k].error);
    }
  };

  generate(0);
  for (int k = 1; k < options.segments; ++k) {
    session::FeedbackAction action;
    if (auto it = options.script.find(k); it != options.script.end()) {
      const ScriptAction& a = it->second;
      switch (a.kind) {
        case ScriptAction::Kind::reuse: break;
        case ScriptAction::Kind::text: action.prompt = session::NewTextPrompt{a.argument}; break;
        case ScriptAction::Kind::speech: {
          if (!options.fixtures) throw Error(Errc::invalid_parameter, "speech actions need --fixtures");
          const auto wav = io::read_file(*options.fixtures / (a.argument + ".wav"));
          action.prompt = session::NewSpeechPrompt{agents::AudioInput::from_wav(wav)};
          break;
        }
      }
      if (a.yaw_degrees) action.recenter = normalize_yaw(*a.yaw_degrees);
    }
    s->apply_feedback(action);
    generate(k);
  }
  ChainResult result{.session = {}, .final_clip = s->finalize(), .hash = {}};
  result.session = s->snapshot();
  result.hash = io::clip_digest(result.final_clip);
  return result;
}

BenchResult run_bench(int recenter_frames, int convert_frames) {
  using Clock = std::chrono::steady_clock;
  BenchResult r;
  std::mt19937_64 rng(1);
  auto random_frame = [&](int w, int h) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
    for (auto& v : px) v = static_cast<std::uint8_t>(rng());
    return Frame(w, h, std::move(px));
  };

  const EquirectFrame pano(random_frame(r.width, r.height));
  std::size_t sink = 0;
  auto t0 = Clock::now();
  for (int i = 0; i < recenter_frames; ++i) {
    const EquirectFrame out = recenter(pano, normalize_yaw(1.5 * (i + 1)));
    sink += out.frame().pixels()[i];
  }
  r.recenter_fps = recenter_frames / std::chrono::duration<double>(Clock::now() - t0).count();

  // A typical 5:3 generator frame.
  const Frame source = random_frame(1280, 768);
  ProjectionParams params;
  params.out_width = r.width;
  t0 = Clock::now();
  for (int i = 0; i < convert_frames; ++i) {
    const EquirectFrame out = to_equirect(source, params);
    sink += out.frame().pixels()[i];
  }
  r.to_equirect_fps = convert_frames / std::chrono::duration<double>(Clock::now() - t0).count();
  if (sink == 1) std::cerr << "";  // keep the results observable
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Panoramic video co-creation pipeline", "panoctl"};
  app.require_subcommand(1);
  std::function<int()> action;

  ProjectionParams proj;
  auto add_projection = [&](CLI::App* cmd) {
    cmd->add_option("--width", proj.out_width, "Output width in pixels (height is half)");
    cmd->add_option("--blur-frac", proj.blur_sigma_frac, "Background blur sigma as a fraction of height");
    cmd->add_option("--fg-frac", proj.fg_height_frac, "Foreground height as a fraction of output height");
    cmd->add_option("--band-frac", proj.blend_band_frac, "Seam blend band as a fraction of width");
  };

  std::string in_path, out_path;
  bool as_json = false;

  auto* convert = app.add_subcommand("convert", "Project frames onto a 2:1 equirectangular canvas");
  convert->add_option("input", in_path, "PNG file or frame directory")->required();
  convert->add_option("output", out_path, "Output frame directory")->required();
  add_projection(convert);
  convert->add_flag("--json", as_json, "Print seam scores as JSON");
  convert->callback([&] {
    action = [&] {
      proj.validate();
      const Clip in = io::read_sequence(in_path);
      std::vector<Frame> frames;
      frames.reserve(in.size());
      for (const auto& f : in.frames()) frames.push_back(to_equirect(*f, proj).frame());
      const Clip result(std::move(frames), in.fps());
      io::write_sequence(out_path, result, {{"projection", projection_json(proj)}, {kYawKey, 0.0}});
      print_seams(out, result, as_json);
      return exit_code::ok;
    };
  });

  double yaw = 0;
  auto* recenter_cmd = app.add_subcommand("recenter", "Rotate equirect frames about the vertical axis");
  recenter_cmd->add_option("input", in_path, "Frame directory or PNG")->required();
  recenter_cmd->add_option("output", out_path, "Output frame directory")->required();
  recenter_cmd->add_option("--yaw", yaw, "New forward direction in degrees")->required();
  recenter_cmd->callback([&] {
    action = [&] {
      const YawAngle y = normalize_yaw(yaw);
      const Clip in = io::read_sequence(in_path);
      std::vector<EquirectFrame> frames;
      for (auto& f : equirect_frames(in)) frames.push_back(recenter(f, y));
      double prior = 0;
      if (fs::is_directory(in_path)) prior = io::read_sequence_manifest(in_path).value(kYawKey, 0.0);
      const YawAngle total = normalize_yaw(prior) + y;
      io::write_sequence(out_path, clip_of(std::move(frames), in.fps()), {{kYawKey, total.degrees()}});
      out << "shift " << yaw_to_shift(y, in.width()) << " columns, cumulative yaw " << total.degrees() << "\n";
      return exit_code::ok;
    };
  });

  auto* blend = app.add_subcommand("blend", "Cross-fade the left and right edges of every frame");
  blend->add_option("input", in_path, "Frame directory or PNG")->required();
  blend->add_option("output", out_path, "Output frame directory")->required();
  blend->add_option("--band-frac", proj.blend_band_frac, "Blend band as a fraction of width");
  blend->add_flag("--json", as_json, "Print seam scores as JSON");
  blend->callback([&] {
    action = [&] {
      proj.validate();
      const Clip in = io::read_sequence(in_path);
      std::vector<EquirectFrame> frames;
      for (auto& f : equirect_frames(in)) frames.push_back(edge_blend(f, proj.blend_band_frac));
      json extra = json::object();
      if (fs::is_directory(in_path)) {
        if (auto m = io::read_sequence_manifest(in_path); m.contains(kYawKey)) extra[kYawKey] = m[kYawKey];
      }
      const Clip result = clip_of(std::move(frames), in.fps());
      io::write_sequence(out_path, result, extra);
      print_seams(out, result, as_json);
      return exit_code::ok;
    };
  });

  ChainOptions chain_opts;
  std::string image_path, script_path, fixtures_path;
  bool hash_only = false;
  auto* chain = app.add_subcommand("chain", "Run the co-creation loop headlessly on mock backends");
  chain->add_option("--prompt", chain_opts.prompt, "Initial text prompt");
  chain->add_option("--image", image_path, "Initial image (PNG)");
  chain->add_option("--segments", chain_opts.segments, "Number of segments");
  chain->add_option("--seed", chain_opts.seed, "Generation seed");
  chain->add_option("--yaw-script", script_path, "Action script, one line per segment");
  chain->add_option("--fps", chain_opts.fps, "Frames per second");
  chain->add_option("--duration", chain_opts.duration_s, "Seconds per segment");
  chain->add_option("--fixtures", fixtures_path, "Directory with transcripts.json and <id>.wav");
  chain->add_option("--out", out_path, "Output frame directory for the final clip");
  chain->add_flag("--hash-only", hash_only, "Only print the hash; write nothing");
  chain->add_flag("--json", as_json, "Print the summary as JSON");
  add_projection(chain);
  chain->callback([&] {
    action = [&]() -> int {
      chain_opts.projection = proj;
      proj.validate();
      if (chain_opts.segments < 1 || chain_opts.segments > session::SessionConfig::kMaxSegments) {
        throw Error(Errc::invalid_parameter, "--segments must be in 1.." + std::to_string(session::SessionConfig::kMaxSegments));
      }
      if (out_path.empty() && !hash_only) throw Error(Errc::invalid_parameter, "chain needs --out or --hash-only");
      if (!image_path.empty()) chain_opts.image = io::read_png(image_path);
      if (!fixtures_path.empty()) chain_opts.fixtures = fixtures_path;
      if (!script_path.empty()) {
        const auto bytes = io::read_file(script_path);
        try {
          chain_opts.script = parse_script({reinterpret_cast<const char*>(bytes.data()), bytes.size()}, chain_opts.segments);
        } catch (const ScriptError& e) {
          err << "panoctl: " << script_path << ": " << e.what() << "\n";
          return exit_code::script_error;
        }
      }
      const ChainResult r = run_chain(chain_opts);
      if (!hash_only) {
        json segments = json::array();
        for (const auto& seg : r.session.segments) {
          segments.push_back({{"index", seg.index},
                              {"prompt", seg.refined.rendered},
                              {"yaw_at_generation", seg.yaw_at_generation.degrees()},
                              {"frame_count", seg.clip->size()}});
        }
        io::write_sequence(out_path, r.final_clip, {{"hash", r.hash}, {"seed", chain_opts.seed}, {"segments", segments}});
      }
      if (as_json) {
        out << json{{"frame_count", r.final_clip.size()}, {"duration_s", r.final_clip.duration_seconds()}, {"hash", r.hash}}.dump()
            << "\n";
      } else if (hash_only) {
        out << r.hash << "\n";
      } else {
        out << r.final_clip.size() << " frames, " << r.final_clip.duration_seconds() << " s, hash " << r.hash << "\n";
      }
      return exit_code::ok;
    };
  });

  std::vector<std::string> inputs;
  auto* concat_cmd = app.add_subcommand("concat", "Concatenate frame sequences");
  concat_cmd->add_option("inputs", inputs, "Frame directories, in order")->required();
  concat_cmd->add_option("--out", out_path, "Output frame directory")->required();
  concat_cmd->callback([&] {
    action = [&] {
      std::vector<Clip> clips;
      for (const auto& p : inputs) clips.push_back(io::read_sequence(p));
      const Clip result = concat(clips);
      io::write_sequence(out_path, result);
      out << result.size() << " frames, " << result.duration_seconds() << " s\n";
      return exit_code::ok;
    };
  });

  auto* seam = app.add_subcommand("seam", "Print the seam continuity of every frame");
  seam->add_option("input", in_path, "Frame directory or PNG")->required();
  seam->add_flag("--json", as_json, "Print as JSON");
  seam->callback([&] {
    action = [&] {
      print_seams(out, io::read_sequence(in_path), as_json);
      return exit_code::ok;
    };
  });

  std::string root = "sessions", backend = "mock", host = "127.0.0.1", ui_dir;
  int port = 8360;
  std::uint64_t serve_seed = 0;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--root", root, "Session store directory");
  serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve->add_option("--backend", backend, "mock or remote")->check(CLI::IsMember({"mock", "remote"}));
  serve->add_option("--seed", serve_seed, "Default seed for new sessions");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--ui-dir", ui_dir, "Viewer bundle served at /");
  serve->add_option("--fixtures", fixtures_path, "Transcript table for the mock transcriber");
  serve->callback([&] {
    action = [&]() -> int {
      service::ServiceOptions o;
      o.root = root;
      o.default_seed = serve_seed;
      o.backends = backend == "remote" ? agents::remote_backends_from_env()
                                       : mock_suite(fixtures_path.empty() ? std::nullopt : std::optional<fs::path>(fixtures_path));
      service::Service svc(std::move(o));
      httplib::Server server;
      service::mount_api(server, svc);
      if (!ui_dir.empty() && !service::mount_ui(server, ui_dir)) {
        throw Error(Errc::io, "UI directory not found: " + ui_dir);
      }
      if (!server.bind_to_port(host, port)) throw Error(Errc::io, "cannot bind " + host + ":" + std::to_string(port));
      g_server = &server;
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      out << "serving " << root << " on http://" << host << ":" << port << "\n" << std::flush;
      server.listen_after_bind();
      g_server = nullptr;
      return exit_code::ok;
    };
  });

  int recenter_frames = 240, convert_frames = 24;
  auto* bench = app.add_subcommand("bench", "Measure recenter and to_equirect throughput at 2048x1024");
  bench->add_option("--recenter-frames", recenter_frames, "Frames to recenter")->check(CLI::PositiveNumber);
  bench->add_option("--convert-frames", convert_frames, "Frames to convert")->check(CLI::PositiveNumber);
  bench->add_flag("--json", as_json, "Print as JSON");
  bench->callback([&] {
    action = [&] {
      const BenchResult r = run_bench(recenter_frames, convert_frames);
      if (as_json) {
        out << json{{"width", r.width}, {"height", r.height}, {"recenter_fps", r.recenter_fps},
                    {"to_equirect_fps", r.to_equirect_fps}}.dump()
            << "\n";
      } else {
        out << std::fixed << std::setprecision(1) << "recenter     " << r.recenter_fps << " frames/s\n"
            << "to_equirect  " << r.to_equirect_fps << " frames/s\n";
      }
      return exit_code::ok;
    };
  });

  auto* export_cmd = app.add_subcommand("export", "Encode a frame directory to MP4 with ffmpeg");
  export_cmd->add_option("input", in_path, "Frame directory")->required();
  export_cmd->add_option("output", out_path, "Output .mp4")->required();
  export_cmd->callback([&] {
    action = [&]() -> int {
      if (!fs::is_directory(in_path)) throw Error(Errc::io, "no such directory: " + in_path);
      if (std::system("command -v ffmpeg >/dev/null 2>&1") != 0) {
        err << "panoctl: ffmpeg not found on PATH\n";
        return exit_code::failure;
      }
      const int fps = io::read_sequence_manifest(in_path).value("fps", Clip::kDefaultFps);
      const std::string cmd = "ffmpeg -loglevel error -y -framerate " + std::to_string(fps) + " -i " +
                              shell_quote((fs::path(in_path) / "frame_%05d.png").string()) +
                              " -pix_fmt yuv420p " + shell_quote(out_path);
      return std::system(cmd.c_str()) == 0 ? exit_code::ok : exit_code::failure;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "panoctl: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return exit_code::usage;
  }

  try {
    return action();
  } catch (const Error& e) {
    err << "panoctl: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::invalid_parameter:
      case Errc::invalid_angle: {
        const auto subs = app.get_subcommands();
        if (!subs.empty()) err << subs.front()->help();
        return exit_code::usage;
      }
      case Errc::io:
      case Errc::invalid_input:
      case Errc::not_found: return exit_code::unreadable_input;
      default: return exit_code::failure;
    }
  } catch (const std::exception& e) {
    err << "panoctl: " << e.what() << "\n";
    return exit_code::failure;
  }
}

}  // namespace pano::cli
