#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ltlsem/rng.hpp"
#include "ltlsem/word.hpp"

namespace ltlsem {

// Toroidal grid with letters placed on cells. Walking onto a lettered cell
// emits that letter as the MDP label; empty cells emit the empty letter.
struct LetterWorldConfig {
  int grid = 7;
  std::vector<std::string> letters = {"a", "b", "c", "d", "e", "f",
                                      "g", "h", "i", "j", "k", "l"};
  int copies = 2;

  Alphabet label_set() const {
    std::vector<Letter> out{Letter{}};
    for (const std::string& l : letters) out.push_back(Letter{l});
    return make_alphabet(std::move(out));
  }
};

enum class Move { North, East, South, West };

inline Move move_from_index(int i) { return static_cast<Move>(i & 3); }

class LetterWorld {
public:
  // Uniform collision-free placement; each letter appears `copies` times.
  // The agent cell is drawn independently and may coincide with a letter.
  static LetterWorld reset(const LetterWorldConfig& cfg, std::uint64_t seed) {
    const int cells = cfg.grid * cfg.grid;
    const int needed = static_cast<int>(cfg.letters.size()) * cfg.copies;
    if (needed > cells - 1)
      throw std::invalid_argument("letterworld: " + std::to_string(needed) +
                                  " letter cells do not fit a " + std::to_string(cfg.grid) +
                                  "x" + std::to_string(cfg.grid) + " grid");
    LetterWorld env;
    env.cfg_ = cfg;
    env.cell_letter_.assign(cells, -1);
    Rng rng(seed);
    std::vector<int> order(cells);
    for (int i = 0; i < cells; ++i) order[i] = i;
    rng.shuffle(order);
    for (int i = 0; i < needed; ++i)
      env.cell_letter_[order[i]] = i / cfg.copies;
    int agent = static_cast<int>(rng.pick(cells));
    env.agent_row_ = agent / cfg.grid;
    env.agent_col_ = agent % cfg.grid;
    return env;
  }

  const LetterWorldConfig& config() const { return cfg_; }
  int agent_row() const { return agent_row_; }
  int agent_col() const { return agent_col_; }
  int steps() const { return steps_; }

  // Moves along a cardinal direction; the grid wraps around. Returns the
  // label of the cell the agent lands on.
  Letter step(Move move) {
    const int g = cfg_.grid;
    switch (move) {
      case Move::North: agent_row_ = (agent_row_ + g - 1) % g; break;
      case Move::South: agent_row_ = (agent_row_ + 1) % g; break;
      case Move::East: agent_col_ = (agent_col_ + 1) % g; break;
      case Move::West: agent_col_ = (agent_col_ + g - 1) % g; break;
    }
    ++steps_;
    return label();
  }

  Letter label() const {
    int idx = cell_letter_[agent_row_ * cfg_.grid + agent_col_];
    if (idx < 0) return Letter{};
    return Letter{cfg_.letters[static_cast<std::size_t>(idx)]};
  }

  // Egocentric binary tensor of shape grid x grid x (letters + 1), flattened
  // row-major with the channel as the innermost index. Cell (0,0) is the
  // top-left of the view and the agent sits at the centre; the last channel
  // holds a single 1 there.
  std::vector<double> observation() const {
    const int g = cfg_.grid;
    const int channels = static_cast<int>(cfg_.letters.size()) + 1;
    std::vector<double> obs(static_cast<std::size_t>(g) * g * channels, 0.0);
    const int half = g / 2;
    for (int r = 0; r < g; ++r) {
      for (int c = 0; c < g; ++c) {
        int letter = cell_letter_[r * g + c];
        if (letter < 0) continue;
        int vr = (r - agent_row_ + half + g) % g;
        int vc = (c - agent_col_ + half + g) % g;
        obs[static_cast<std::size_t>((vr * g + vc) * channels + letter)] = 1.0;
      }
    }
    obs[static_cast<std::size_t>((half * g + half) * channels + channels - 1)] = 1.0;
    return obs;
  }

  std::size_t observation_size() const {
    return static_cast<std::size_t>(cfg_.grid) * cfg_.grid * (cfg_.letters.size() + 1);
  }

  // Letter channel of the egocentric cell (vr, vc), or -1 if empty. Used by
  // the interaction feature map.
  int letter_at_view(int vr, int vc) const {
    const int g = cfg_.grid;
    const int half = g / 2;
    int r = (vr - half + agent_row_ + g) % g;
    int c = (vc - half + agent_col_ + g) % g;
    return cell_letter_[r * g + c];
  }

private:
  LetterWorldConfig cfg_;
  std::vector<int> cell_letter_;
  int agent_row_ = 0;
  int agent_col_ = 0;
  int steps_ = 0;
};

}  // namespace ltlsem
