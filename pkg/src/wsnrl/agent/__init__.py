from .network import PolicyNet, conv_output_shape, feature_size_for
from .ppo import (PpoHyper, RolloutBuffer, clipped_surrogate, gae, greedy_action, ppo_loss,
                  sample_action, update)
from .train import collect, load_checkpoint, run_policy, save_checkpoint, train
