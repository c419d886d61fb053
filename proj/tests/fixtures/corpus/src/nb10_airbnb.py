# %% [markdown]
# # Listings
# %%
import pandas as pd
import numpy as np
# %%
listings = pd.read_csv('airbnb.csv')  # op: read
listings['last_review'] = pd.to_datetime(listings['last_review'])  # op: datetime
listings['reviews_per_month'] = listings['reviews_per_month'].fillna(0)  # op: fillna
# %%
room_codes = {'Entire home/apt': 0, 'Private room': 1, 'Shared room': 2}
listings['room_code'] = listings['room_type'].map(room_codes)  # op: map
# %%
listings = listings[listings['price'] > 0].copy()
listings['log_price'] = np.log1p(listings['price'])
listings.groupby('neighbourhood')['price'].mean()
