// Compiles every public header on its own so a missing include shows up here
// rather than in a user's build.
#include "dcsk_relay/channel.hpp"
#include "dcsk_relay/dcsk.hpp"
#include "dcsk_relay/dcsk_relay.hpp"
#include "dcsk_relay/experiment/config.hpp"
#include "dcsk_relay/experiment/experiment.hpp"
#include "dcsk_relay/linksel.hpp"
#include "dcsk_relay/montecarlo.hpp"
#include "dcsk_relay/params.hpp"
#include "dcsk_relay/swipt.hpp"
#include "dcsk_relay/theory/ber.hpp"
#include "dcsk_relay/theory/buffer_chain.hpp"
#include "dcsk_relay/theory/delay.hpp"
#include "dcsk_relay/theory/gauss_hermite.hpp"
#include "dcsk_relay/theory/special_functions.hpp"
#include "dcsk_relay/theory/theory.hpp"
