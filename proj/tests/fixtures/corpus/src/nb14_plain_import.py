# %%
import pandas
import numpy as np
# %%
frame = pandas.read_csv('train.csv')  # op: read
frame['Fare'] = frame['Fare'].apply(np.sqrt)  # op: apply
frame['Cabin'] = frame['Cabin'].fillna('U')  # op: fillna
frame['Deck'] = frame['Cabin'].map(lambda c: c[0])  # op: map
# %%
frame = frame.drop(['Ticket', 'Name'], axis=1)  # op: drop
frame.tail()
