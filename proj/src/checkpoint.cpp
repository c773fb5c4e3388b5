#include "marl/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace marl {

namespace {

constexpr char kMagic[8] = {'M', 'A', 'R', 'L', 'C', 'K', 'P', 'T'};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class T>
void put(std::string& out, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  out.append(p, sizeof(T));
}

void put_str(std::string& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

struct Reader {
  const std::string& buf;
  std::size_t off = 0;

  template <class T>
  T get() {
    if (off + sizeof(T) > buf.size()) {
      throw CheckpointError("checkpoint truncated");
    }
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
  }
  std::string get_str() {
    const auto n = get<std::uint32_t>();
    if (off + n > buf.size()) throw CheckpointError("checkpoint truncated");
    std::string s = buf.substr(off, n);
    off += n;
    return s;
  }
};

void load_net_flat(const Checkpoint& ckpt, const std::string& name,
                   auto& net) {
  const auto* flat = ckpt.find(name);
  if (!flat) throw CheckpointError("checkpoint missing tensor: " + name);
  const auto expect = to_flat(net).size();
  if (flat->size() != expect) {
    throw CheckpointError("checkpoint layout mismatch for " + name +
                          ": stored " + std::to_string(flat->size()) +
                          " values, expected " + std::to_string(expect));
  }
  from_flat(std::span<const double>(*flat), net);
}

void save_adam(Checkpoint& ckpt, const std::string& prefix,
               const AdamState& st) {
  ckpt.tensors.emplace_back(prefix + "/m", st.m);
  ckpt.tensors.emplace_back(prefix + "/v", st.v);
  ckpt.metadata[prefix + "/t"] = std::to_string(st.t);
}

void load_adam(const Checkpoint& ckpt, const std::string& prefix,
               AdamState& st) {
  const auto* m = ckpt.find(prefix + "/m");
  const auto* v = ckpt.find(prefix + "/v");
  if (!m || !v) throw CheckpointError("checkpoint missing " + prefix);
  st.m = *m;
  st.v = *v;
  auto it = ckpt.metadata.find(prefix + "/t");
  st.t = it == ckpt.metadata.end() ? 0 : std::stol(it->second);
}

}  // namespace

const std::vector<double>* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::string payload;
  put<std::uint32_t>(payload, static_cast<std::uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    put_str(payload, k);
    put_str(payload, v);
  }
  put<std::uint32_t>(payload, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, values] : ckpt.tensors) {
    put_str(payload, name);
    put<std::uint64_t>(payload, values.size());
    payload.append(reinterpret_cast<const char*>(values.data()),
                   values.size() * sizeof(double));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  std::string header;
  put<std::uint32_t>(header, Checkpoint::kVersion);
  put<std::uint64_t>(header, payload.size());
  put<std::uint64_t>(header, fnv1a(payload));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw CheckpointError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  if (bytes.size() < sizeof(kMagic) + 4 + 8 + 8 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file: " + path);
  }
  Reader r{bytes, sizeof(kMagic)};
  const auto version = r.get<std::uint32_t>();
  if (version != Checkpoint::kVersion) {
    throw CheckpointError("checkpoint version mismatch: file has " +
                          std::to_string(version) + ", expected " +
                          std::to_string(Checkpoint::kVersion));
  }
  const auto payload_len = r.get<std::uint64_t>();
  const auto checksum = r.get<std::uint64_t>();
  if (r.off + payload_len != bytes.size()) {
    throw CheckpointError("checkpoint truncated or oversized");
  }
  const std::string payload = bytes.substr(r.off, payload_len);
  if (fnv1a(payload) != checksum) {
    throw CheckpointError("checkpoint checksum mismatch (corrupted file)");
  }
  Reader p{payload, 0};
  Checkpoint ckpt;
  const auto n_meta = p.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = p.get_str();
    ckpt.metadata[k] = p.get_str();
  }
  const auto n_tensors = p.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = p.get_str();
    const auto count = p.get<std::uint64_t>();
    if (p.off + count * sizeof(double) > payload.size()) {
      throw CheckpointError("checkpoint truncated");
    }
    std::vector<double> values(count);
    std::memcpy(values.data(), payload.data() + p.off,
                count * sizeof(double));
    p.off += count * sizeof(double);
    ckpt.tensors.emplace_back(std::move(name), std::move(values));
  }
  return ckpt;
}

Checkpoint checkpoint_from_team(const TeamNets& team,
                                std::map<std::string, std::string> metadata) {
  Checkpoint ckpt;
  ckpt.metadata = std::move(metadata);
  ckpt.metadata["n_policies"] = std::to_string(team.agents.size());
  ckpt.metadata["n_trained"] = std::to_string(team.n_trained);
  for (std::size_t a = 0; a < team.agents.size(); ++a) {
    const AgentNets& an = team.agents[a];
    const std::string p = "agent" + std::to_string(a);
    if (an.lstm) {
      ckpt.tensors.emplace_back(p + "/actor", to_flat(an.lactor));
      ckpt.tensors.emplace_back(p + "/actor_target", to_flat(an.lactor_target));
    } else {
      ckpt.tensors.emplace_back(p + "/actor", to_flat(an.actor));
      ckpt.tensors.emplace_back(p + "/actor_target", to_flat(an.actor_target));
    }
    ckpt.tensors.emplace_back(p + "/critic", to_flat(an.critic));
    ckpt.tensors.emplace_back(p + "/critic_target", to_flat(an.critic_target));
    save_adam(ckpt, p + "/opt_actor", an.opt_actor);
    save_adam(ckpt, p + "/opt_critic", an.opt_critic);
  }
  if (team.mixer.kind != MixerKind::Vdn && team.mixer.n > 0) {
    ckpt.tensors.emplace_back("mixer", to_flat(team.mixer));
    ckpt.tensors.emplace_back("mixer_target", to_flat(team.mixer_target));
    save_adam(ckpt, "opt_mixer", team.opt_mixer);
  }
  return ckpt;
}

void team_from_checkpoint(const Checkpoint& ckpt, TeamNets& team) {
  auto it = ckpt.metadata.find("n_policies");
  if (it == ckpt.metadata.end() ||
      std::stoul(it->second) != team.agents.size()) {
    throw CheckpointError("checkpoint policy count mismatch");
  }
  for (std::size_t a = 0; a < team.agents.size(); ++a) {
    AgentNets& an = team.agents[a];
    const std::string p = "agent" + std::to_string(a);
    if (an.lstm) {
      load_net_flat(ckpt, p + "/actor", an.lactor);
      load_net_flat(ckpt, p + "/actor_target", an.lactor_target);
    } else {
      load_net_flat(ckpt, p + "/actor", an.actor);
      load_net_flat(ckpt, p + "/actor_target", an.actor_target);
    }
    load_net_flat(ckpt, p + "/critic", an.critic);
    load_net_flat(ckpt, p + "/critic_target", an.critic_target);
    load_adam(ckpt, p + "/opt_actor", an.opt_actor);
    load_adam(ckpt, p + "/opt_critic", an.opt_critic);
  }
  if (team.mixer.kind != MixerKind::Vdn && team.mixer.n > 0) {
    load_net_flat(ckpt, "mixer", team.mixer);
    load_net_flat(ckpt, "mixer_target", team.mixer_target);
    load_adam(ckpt, "opt_mixer", team.opt_mixer);
  }
}

}  // namespace marl
