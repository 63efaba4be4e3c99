// SPDX-License-Identifier: Apache-2.0

#include "trimf/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trimf/errors.hpp"
#include "trimf/optim.hpp"

namespace trimf {

namespace {

// instance through the bilinear form against every slot
std::vector<double> slot_scores(const std::vector<double>& instance,
                                const Tensor& form, const Tensor& slots) {
    size_t d = instance.size();
    if (form.rows() != d) throw_dim("write instance/form mismatch");
    std::vector<double> proj(form.cols(), 0.0);
    for (size_t i = 0; i < d; ++i) {
        double v = instance[i];
        if (v == 0.0) continue;
        for (size_t j = 0; j < form.cols(); ++j) proj[j] += v * form.at(i, j);
    }
    std::vector<double> scores(slots.rows(), 0.0);
    for (size_t c = 0; c < slots.rows(); ++c) {
        double s = 0.0;
        for (size_t j = 0; j < slots.cols(); ++j) s += proj[j] * slots.at(c, j);
        scores[c] = s;
    }
    return scores;
}

void write_entity_memory(Model& model, const SentenceLossParts& parts,
                         double lr) {
    size_t n_cat = model.entity_memory.slot_count();
    for (size_t i = 0; i < parts.span_encodings.size(); ++i) {
        const std::vector<double>& inst = parts.span_encodings[i].values();
        std::vector<double> s = slot_scores(inst, model.entity_classifier.tensor,
                                            model.entity_memory.slots);
        double mx = *std::max_element(s.begin(), s.end());
        double z = 0.0;
        for (double& v : s) {
            v = std::exp(v - mx);
            z += v;
        }
        std::vector<double> grad(n_cat);
        for (size_t c = 0; c < n_cat; ++c) grad[c] = s[c] / z;
        grad[parts.span_labels[i]] -= 1.0;
        memory_write(model.entity_memory, inst, model.entity_classifier.tensor,
                     grad, lr);
    }
}

void write_relation_memory(Model& model, const SentenceLossParts& parts,
                           double lr) {
    size_t n_cat = model.relation_memory.slot_count();
    for (size_t i = 0; i < parts.pair_encodings.size(); ++i) {
        const std::vector<double>& inst = parts.pair_encodings[i].values();
        std::vector<double> s = slot_scores(inst, model.relation_classifier.tensor,
                                            model.relation_memory.slots);
        std::vector<double> grad(n_cat);
        for (size_t c = 0; c < n_cat; ++c)
            grad[c] = 1.0 / (1.0 + std::exp(-s[c])) -
                      double(parts.pair_targets[i][c]);
        memory_write(model.relation_memory, inst, model.relation_classifier.tensor,
                     grad, lr);
    }
}

void apply_slot_gradients(Memory& mem, double lr) {
    Tensor& slots = mem.slots;
    if (!slots.has_grad()) return;
    const std::vector<double>& g = slots.grad();
    std::vector<double>& v = slots.mutable_values();
    for (size_t i = 0; i < v.size(); ++i) v[i] -= lr * g[i];
    slots.zero_grad();
}

}  // namespace

TrainResult train_two_stage(Model& model, const Corpus& corpus,
                            const EpochCallback& on_epoch) {
    if (corpus.sentences.empty()) throw_corpus("cannot train on an empty corpus");
    const TrainConfig& cfg = model.cfg;
    cfg.validate();

    std::vector<PreparedSentence> prepared;
    prepared.reserve(corpus.sentences.size());
    for (const Sentence& s : corpus.sentences)
        prepared.push_back(prepare_sentence(s, model));

    size_t n = prepared.size();
    size_t batch = size_t(std::max<int64_t>(1, cfg.batch_size));
    int64_t steps_per_epoch = int64_t((n + batch - 1) / batch);
    int64_t total_epochs = cfg.stage1_epochs + cfg.stage2_epochs;
    int64_t total_steps = std::max<int64_t>(1, total_epochs * steps_per_epoch);
    int64_t warmup_steps =
        int64_t(std::llround(cfg.warmup_fraction * double(total_steps)));

    Adam adam;
    std::set<std::string> stage1_groups{"classifier", "graph", "encoder"};
    std::vector<Parameter*> stage1_params =
        model.parameters_for_groups(stage1_groups);
    std::vector<Parameter*> all_params = model.parameters();

    TrainResult result;
    int64_t global_step = 0;
    for (int64_t epoch = 0; epoch < total_epochs; ++epoch) {
        bool stage2 = epoch >= cfg.stage1_epochs;
        Rng rng(derive_seed(cfg.seed, "epoch." + std::to_string(epoch)));
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        double loss_sum = 0.0;
        double last_lr = 0.0;
        int64_t batches = 0;
        for (size_t b0 = 0; b0 < n; b0 += batch) {
            double lr = scheduled_lr(global_step, warmup_steps, total_steps,
                                     cfg.peak_lr);
            last_lr = lr;
            std::vector<SentenceLossParts> parts;
            PipelineOptions opt;
            opt.stage2 = stage2;
            opt.train_mode = true;
            opt.rng = &rng;
            for (size_t k = b0; k < std::min(n, b0 + batch); ++k) {
                const PreparedSentence& ps = prepared[order[k]];
                Candidates cands = sample_negatives(model, *ps.sentence, rng);
                parts.push_back(forward_candidates(model, ps, cands, opt));
            }
            Tensor loss = joint_loss(model, parts, rng, true);
            loss_sum += loss.item();
            loss.backward();
            adam.step(stage2 ? all_params : stage1_params, lr);
            if (stage2) {
                apply_slot_gradients(model.entity_memory, lr);
                apply_slot_gradients(model.relation_memory, lr);
            }
            // slots may hold grads from reads that were excluded by the
            // flow flags in stage 1 edge cases; clear defensively
            model.entity_memory.slots.zero_grad();
            model.relation_memory.slots.zero_grad();
            if (lr > 0.0) {  // the warmup ramp starts at zero; skip the no-op
                for (const SentenceLossParts& p : parts) {
                    write_entity_memory(model, p, lr);
                    write_relation_memory(model, p, lr);
                }
            }
            ++global_step;
            ++batches;
        }

        EpochMetrics em;
        em.stage = stage2 ? 2 : 1;
        em.epoch = epoch;
        em.mean_loss = batches ? loss_sum / double(batches) : 0.0;
        em.last_lr = last_lr;
        result.history.push_back(em);
        if (on_epoch) on_epoch(em);

        if (epoch == 4 && total_epochs > 5) {
            auto smoothed = [&](size_t e) {
                double a = result.history[e].mean_loss;
                double b = result.history[e ? e - 1 : 0].mean_loss;
                return 0.5 * (a + b);
            };
            if (smoothed(4) >= smoothed(1))
                throw_contract(
                    "training failed fast: smoothed loss did not decrease "
                    "over the first five epochs");
        }
    }
    return result;
}

}  // namespace trimf
