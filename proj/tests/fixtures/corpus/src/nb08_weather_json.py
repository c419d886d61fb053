# %% [markdown]
# Weather readings stored as JSON records.
# %%
import pandas as pd
weather = pd.read_json('weather.json')  # op: read
# %%
weather['day'] = pd.to_datetime(weather['day'])  # op: datetime
weather['temp_f'] = weather['temp'].apply(lambda c: c * 9 / 5 + 32)  # op: apply
weather['humidity'] = weather['humidity'].fillna(weather['humidity'].mean())  # op: fillna
weather = weather.drop('city', axis=1)  # op: drop
# %%
weather.describe()
