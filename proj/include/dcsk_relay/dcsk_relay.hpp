#pragma once

#include "dcsk_relay/channel.hpp"
#include "dcsk_relay/dcsk.hpp"
#include "dcsk_relay/linksel.hpp"
#include "dcsk_relay/montecarlo.hpp"
#include "dcsk_relay/params.hpp"
#include "dcsk_relay/swipt.hpp"
#include "dcsk_relay/theory/theory.hpp"
