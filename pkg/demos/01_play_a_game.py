#!/usr/bin/env python3
"""Walk through one expert game by hand.

Four players each hold a unique expertise and a unique task; everyone needs
a confirmation from the one player whose expertise matches their task. This
script stages a few instructive rounds and prints what each player knows.
"""

import numpy as np

from expertgame import Message, MessageType, new_game, sample_assignment

Q, C, R, N = MessageType.Q, MessageType.C, MessageType.R, MessageType.N

rng = np.random.default_rng(4)
assignment = sample_assignment(4, rng)
print("expertise:", assignment.expertise_of)
print("tasks:    ", assignment.task_of)
print("expert of each player (hidden from them):", assignment.expert_of)
print()

state = new_game(assignment, round_limit=6)

print("round 1: only requests are legal")
for player in range(4):
    legal = state.legal_messages(player)
    print(f"  player {player} may send: {[(m.type.value, m.receiver) for m in legal]} or abstain")

# round 1: players 0 and 1 probe each other, player 2 asks 0, player 3 waits
state.stage_action(0, Message(Q, 0, 1, 1))
state.stage_action(1, Message(Q, 1, 0, 1))
state.stage_action(2, Message(Q, 2, 0, 1))
state.stage_action(3, None)
outcome = state.resolve_round()
print(f"\nafter round 1, {len(outcome.delivered)} messages delivered simultaneously")
for player in range(4):
    print(f"  player {player} now knows the expertise of {sorted(state.known_expertise[player])}")

print("\nround 2: replies become available to whoever was asked")
for player in range(4):
    options = [(o.type.value, o.receiver, o.payload) for o in state.reply_options(player)]
    if options:
        print(f"  player {player} can reply: {options}")

# player 0 answers one requester; the reply type is forced by what 0 knows
reply = state.reply_options(0)[0]
state.stage_action(0, Message(reply.type, 0, reply.receiver, 2, reply.payload))
outcome = state.resolve_round()
print(f"\nplayer 0 sent {outcome.delivered[0].type.value} to {outcome.delivered[0].receiver}")
if outcome.newly_scored:
    print(f"players {outcome.newly_scored} scored their point")

for player in range(4):
    expert = state.known_expert[player]
    status = f"knows its expert is {expert}" if expert is not None else "still searching"
    print(f"  player {player}: {status}")
